#pragma once

#include <optional>

#include "blowup/errors.hpp"

// Kind of the blowup::Error thrown by f, or nullopt if it returns normally.
template <class F>
std::optional<blowup::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const blowup::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
