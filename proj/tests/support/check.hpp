#pragma once

#include <gtest/gtest.h>

#include <string>

#include "palim/error.hpp"

namespace palim::test {

/// Runs `f` and returns the code of the palim::Error it throws.
template <class F>
ErrorCode error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no palim::Error thrown";
  return static_cast<ErrorCode>(-1);
}

/// Message of the palim::Error thrown by `f`, empty when none is thrown.
template <class F>
std::string error_message(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "no palim::Error thrown";
  return {};
}

}  // namespace palim::test
