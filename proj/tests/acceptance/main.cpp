#include <iostream>

#include <CLI11.hpp>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  masec::acceptance::SuiteOptions options;
  CLI::App app{"acceptance criteria"};
  app.add_option("--criteria", options.criteria, "subset of criteria (1-10)")->delimiter(',');
  app.add_option("--seeds", options.seeds, "seeds for the Monte-Carlo criteria");
  app.add_option("-j,--parallelism", options.parallelism, "worker threads");
  app.add_option("--workdir", options.workdir, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  const auto results = masec::acceptance::run_suite(options, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
