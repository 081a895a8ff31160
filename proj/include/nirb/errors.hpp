// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_ERRORS_HPP
#define NIRB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nirb
{

// Base class for all library errors. The stage tag names the pipeline phase that failed
// ("eim", "decomposition", "greedy", "config", ...), and is empty when not applicable.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string &what, std::string stage = {})
    : std::runtime_error(what), stage_(std::move(stage))
  {
  }
  const std::string &Stage() const { return stage_; }
  void SetStage(std::string stage) { stage_ = std::move(stage); }

private:
  std::string stage_;
};

class SingularMatrix : public Error
{
public:
  using Error::Error;
};

class SingularReducedSystem : public Error
{
public:
  using Error::Error;
};

class ZeroDistance : public Error
{
public:
  using Error::Error;
};

class LengthMismatch : public Error
{
public:
  using Error::Error;
};

class NonFiniteValue : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  explicit ConfigError(const std::string &what) : Error(what, "config") {}
};

class DomainError : public Error
{
public:
  using Error::Error;
};

}  // namespace nirb

#endif  // NIRB_ERRORS_HPP
