#pragma once

#include <stdexcept>
#include <string>

namespace pcpred {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A row with no observed time anywhere. Per-cell predictors cannot handle it;
// placement falls back to the machine ranking instead.
class ColdRowError : public Error {
 public:
  explicit ColdRowError(const std::string& what) : Error(what) {}
};

}  // namespace pcpred
