#ifndef MINLAB_SPEC_IO_HPP
#define MINLAB_SPEC_IO_HPP

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "minlab/generator.hpp"

namespace minlab {

/// Matrix description files. Two shapes are accepted:
///
///   {"family": "birth-death", "birth": "2*(i+1)^2", "death": "(i+1)^2",
///    "params": {"alpha": 2}, "name": "q2"}
///
///   {"rows": [{"i": 0, "entries": [[1, 1.0]], "qi": 1.0}, ...]}
///
/// "family" may also be "pure-birth" (death omitted). In explicit form,
/// "qi" defaults to the off-diagonal sum and unlisted rows are zero.
/// `overrides` replaces entries of "params" (e.g. alpha from the CLI).
QMatrix load_matrix(const nlohmann::json& spec, const ParameterMap& overrides = {});
QMatrix load_matrix_file(const std::filesystem::path& path, const ParameterMap& overrides = {});

/// Parses a rate expression with the spec's bound parameters.
BirthDeathSpec parse_birth_death(const nlohmann::json& spec, const ParameterMap& overrides = {});

}  // namespace minlab

#endif
