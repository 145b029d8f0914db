#pragma once

#include <stdexcept>
#include <string>

namespace neuroloop {

/// Base of every error the toolkit throws. The category decides the CLI
/// exit code: configuration/usage problems map to 1, data problems to 2.
class Error : public std::runtime_error {
public:
  enum class Kind {
    config,
    usage,
    data,
    domain,
    insufficient_data,
    protocol,
    stability,
    singular,
    format,
    integrity,
    registry,
    unsupported,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

  bool is_usage() const noexcept { return kind_ == Kind::config || kind_ == Kind::usage; }

private:
  Kind kind_;
};

namespace detail {
template <Error::Kind K>
struct TypedError : Error {
  explicit TypedError(const std::string& what) : Error(K, what) {}
};
}  // namespace detail

using ConfigError = detail::TypedError<Error::Kind::config>;
using UsageError = detail::TypedError<Error::Kind::usage>;
using DataError = detail::TypedError<Error::Kind::data>;
using DomainError = detail::TypedError<Error::Kind::domain>;
using InsufficientDataError = detail::TypedError<Error::Kind::insufficient_data>;
using ProtocolError = detail::TypedError<Error::Kind::protocol>;
using StabilityError = detail::TypedError<Error::Kind::stability>;
using SingularError = detail::TypedError<Error::Kind::singular>;
using FormatError = detail::TypedError<Error::Kind::format>;
using IntegrityError = detail::TypedError<Error::Kind::integrity>;
using RegistryError = detail::TypedError<Error::Kind::registry>;
using UnsupportedError = detail::TypedError<Error::Kind::unsupported>;

}  // namespace neuroloop
