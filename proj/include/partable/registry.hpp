#pragma once

#include <string>
#include <vector>

namespace partable {

struct ItemResult {
  std::string id;
  bool passed = false;
  std::string detail;
};

/// Every worked result the tool reproduces: closed forms, ln^n, Taylor and
/// asymptotic checks, and the exercise corpus. Order and count are fixed.
std::vector<ItemResult> run_examples();

}  // namespace partable
