#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgclt/chaos.hpp"

namespace sgclt {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed;
  std::string observed;
  std::string expected;
};

enum class SelftestLevel { fast, full };

SelftestLevel parse_selftest_level(const std::string& text);

using GcltFunction = std::function<GcltParams(const TailCoefficients&, double)>;

/// The (alpha = 1, delta1 = 3, delta2 = 1) tail-parameter example against (-1/2, 2/3).
CheckResult check_gclt_example(const GcltFunction& gclt = gclt_params_from_tails);

/// fast: closed forms and small invariant checks. full adds the Table 1
/// replication at scale 0.1 (minimum L = 10^4, stride 8, ten seeds, >= 8/10 per row).
std::vector<CheckResult> run_selftest(SelftestLevel level);

}  // namespace sgclt
