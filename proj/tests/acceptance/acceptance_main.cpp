// One pass/fail line per acceptance criterion; exit status 1 if any criterion fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "spincharge/parallel.hpp"
#include "spincharge/validation.hpp"

int main(int argc, char** argv) {
  spincharge::ValidationOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") opts.quick = true;
    else if (a == "--only" && i + 1 < argc) opts.only.push_back(std::atoi(argv[++i]));
    else if (a == "--threads" && i + 1 < argc) spincharge::par::set_threads(std::atoi(argv[++i]));
  }
  opts.on_result = [](const spincharge::CriterionResult& r) {
    std::fputs(spincharge::format_result(r).c_str(), stdout);
    std::fflush(stdout);
  };
  const auto results = spincharge::run_validation(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed() ? 0 : 1;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
