#pragma once

// Recomputes every reference number and compares it with its tolerance.

#include <functional>
#include <string>
#include <vector>

namespace bentcert::reproduce {

struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;  // accepted interval
  double hi = 0.0;
  bool skipped = false;
  std::string note;

  bool pass() const { return !skipped && value >= lo && value <= hi; }
};

Check within(std::string name, double value, double expected, double tolerance);
Check in_range(std::string name, double value, double lo, double hi);

struct Options {
  bool census = false;  // the vertex census takes several minutes
  int workers = 0;
  std::function<void(const Check&)> on_check;  // called as results arrive
};

std::vector<Check> all_checks(const Options& options = {});

/// Columns n, k, p_fail for k = 1..4. Panel 'a': qutrit MUB plan with 5%
/// white noise; 'b': ququart Pauli plan with 2.5%.
std::string figure2_csv(char panel);

}  // namespace bentcert::reproduce
