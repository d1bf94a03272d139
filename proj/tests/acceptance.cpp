// One line per acceptance criterion; nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "trg/verify.hpp"

namespace {

bool report(int index, const std::string& name, bool passed, double seconds, const std::string& detail) {
  std::printf("criterion %d %s: %s [%.2f s] %s\n", index, passed ? "PASS" : "FAIL", name.c_str(), seconds,
              detail.c_str());
  std::fflush(stdout);
  return passed;
}

}  // namespace

int main() {
  bool ok = true;
  int index = 1;
  for (const auto& check : trg::acceptance_checks()) {
    const auto r = trg::run_check(check);
    ok = report(index++, r.property, r.passed, r.seconds, r.detail) && ok;
  }

  // the full suite through the command-line tool, under its five-minute budget
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd = std::string(TRG_CLI) + " verify > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  ok = report(index, "trg verify exits 0 within 300 s", rc == 0 && secs <= 300.0, secs,
              "exit code " + std::to_string(rc)) &&
       ok;

  std::printf("%s\n", ok ? "all acceptance criteria passed" : "acceptance FAILED");
  return ok ? 0 : 1;
}
