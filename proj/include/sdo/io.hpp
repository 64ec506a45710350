#pragma once

#include <string>
#include <vector>

#include "sdo/model.hpp"
#include "sdo/sigmoid.hpp"

namespace sdo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full-system run configuration parsed from a flat key = value file with
// dotted keys. Recognized keys: alpha, beta, eta, mu, eps, sigmoid.family
// (arctan | hill | gk), sigmoid.n (Hill exponent), sigmoid.k (decay order).
// Unknown keys are an error; '#' starts a comment.
struct RunParams {
    ModelParams params;
    SigmoidSpec sigmoid;
};

RunParams read_params_file(const std::string& path);

// Blow-up parameter bundle file. Keys: k, alpha, beta, phiL0, phiR0.
GammaVector read_gamma_file(const std::string& path);

// All floating-point output uses 17 significant digits so regression diffs
// are meaningful.
std::string format_g17(double v);

// One CSV row from already formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

void write_text_file(const std::string& path, const std::string& content);

} // namespace sdo
