#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nystrom::verify {

enum class Suite { core, exactness, fast_path, adversarial, statistical };

Suite parse_suite(std::string_view s);
std::string_view to_string(Suite s);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  Suite suite = Suite::core;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  // Mutation hook: flips the sign of T3 inside the fast intersection path.
  bool fault_negate_t3 = false;
};

SuiteReport run_suite(Suite suite, const VerifyOptions& options = {});

std::string to_json(const SuiteReport& report);

}  // namespace nystrom::verify
