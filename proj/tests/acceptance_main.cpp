#include <iostream>
#include <string>
#include <vector>

#include "kdvlab/experiment.hpp"
#include "kdvlab/kernels.hpp"
#include "kdvlab/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> filters(argv + 1, argv + argc);
  try {
    kdvlab::VerifySummary summary =
        kdvlab::run_verification(filters, &std::cout);
    kdvlab::print_table(summary, std::cout);
    return summary.all_passed ? 0 : 1;
  } catch (const kdvlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kdvlab::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  }
}
