#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fairbench {

// Error taxonomy shared by all modules. Each class maps to a distinct process
// exit code so CLI failures are scriptable.
class Error : public std::runtime_error {
public:
    Error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& m) : Error("schema error: " + m, 10) {}
};
struct EncodingError : Error {
    explicit EncodingError(const std::string& m) : Error("encoding error: " + m, 11) {}
};
struct IngestionError : Error {
    explicit IngestionError(const std::string& m) : Error("ingestion error: " + m, 12) {}
};
struct ParameterError : Error {
    explicit ParameterError(const std::string& m) : Error("parameter error: " + m, 13) {}
};
struct InputError : Error {
    explicit InputError(const std::string& m) : Error("input error: " + m, 14) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric error: " + m, 15) {}
};
struct ContractError : Error {
    explicit ContractError(const std::string& m) : Error("contract error: " + m, 16) {}
};
struct FitError : Error {
    explicit FitError(const std::string& m) : Error("fit error: " + m, 17) {}
};
struct PairingError : Error {
    explicit PairingError(const std::string& m) : Error("pairing error: " + m, 18) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("i/o error: " + m, 19) {}
};

// Metrics with degenerate denominators are reported as absent, never as 0/NaN.
using Maybe = std::optional<double>;

}  // namespace fairbench
