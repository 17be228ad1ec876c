#pragma once

#include <stdexcept>
#include <string>

namespace ntw {

// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors caused by bad input (CLI maps these to exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

// Violated internal invariants (CLI maps these to exit code 3).
class InternalError : public Error {
 public:
  using Error::Error;
};

#define NTW_INPUT_ERROR(NAME)                          \
  class NAME : public InputError {                     \
   public:                                             \
    using InputError::InputError;                      \
    NAME() : InputError(#NAME) {}                      \
  }

NTW_INPUT_ERROR(EmptyDocument);
NTW_INPUT_ERROR(UnknownPage);
NTW_INPUT_ERROR(BadNodeRef);
NTW_INPUT_ERROR(EmptyLabelSet);
NTW_INPUT_ERROR(NotTextNode);
NTW_INPUT_ERROR(NotFeatureBased);
NTW_INPUT_ERROR(TooManyLabels);
NTW_INPUT_ERROR(DegenerateModel);
NTW_INPUT_ERROR(EmptySample);
NTW_INPUT_ERROR(UnfittedModel);
NTW_INPUT_ERROR(MissingType);
NTW_INPUT_ERROR(NoGold);
NTW_INPUT_ERROR(BadPattern);
NTW_INPUT_ERROR(BadTemplate);
NTW_INPUT_ERROR(NoSingleEntityWrapper);

#undef NTW_INPUT_ERROR

}  // namespace ntw
