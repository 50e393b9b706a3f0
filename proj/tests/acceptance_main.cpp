#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "maupertuis/validate.hpp"

// Runs every invariant of the toolkit once with per-check timing, then repeats
// the sweep to confirm the serialized report is byte-identical. One line per
// check; exit status 0 only if all of them hold.

int main() {
  using clock = std::chrono::steady_clock;
  std::vector<maup::criterion_result> first;
  bool all_pass = true;

  for (int id = 1; id <= 12; ++id) {
    const auto t0 = clock::now();
    maup::criterion_result r;
    try {
      r = maup::run_criterion(id);
    } catch (const std::exception& e) {
      r = {id, std::string("raised: ") + e.what(), 0.0, 0.0, false};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    first.push_back(r);
    all_pass = all_pass && r.pass;
    std::printf("criterion %02d %s %s value=%.6g tolerance=%.6g (%.2fs)\n", r.id,
                r.pass ? "pass" : "FAIL", r.name.c_str(), r.value, r.tolerance, secs);
    std::fflush(stdout);
  }

  const auto t0 = clock::now();
  std::vector<maup::criterion_result> second;
  bool rerun_ok = true;
  try {
    for (int id = 1; id <= 12; ++id) second.push_back(maup::run_criterion(id));
    rerun_ok = maup::summary_to_string("rerun-probe", first) ==
               maup::summary_to_string("rerun-probe", second);
  } catch (const std::exception&) {
    rerun_ok = false;
  }
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  all_pass = all_pass && rerun_ok;
  std::printf("criterion 13 %s byte-identical rerun of checks 1-12 value=%g tolerance=0 (%.2fs)\n",
              rerun_ok ? "pass" : "FAIL", rerun_ok ? 0.0 : 1.0, secs);

  std::printf("result %s\n", all_pass ? "pass" : "FAIL");
  return all_pass ? 0 : 1;
}
