#pragma once

// JSON file formats for ensembles and POVMs.
//
//   ensemble: {"dim": D, "priors": [...],
//              "states": [{"pure": true, "amplitudes": [[re, im], ...]}
//                         | {"pure": false, "matrix": [[[re, im], ...], ...]}]}
//   povm:     {"dim": D, "elements": [matrix, ...]}
//
// Complex numbers are [re, im]; matrices are arrays of rows. Doubles are
// written in shortest round-trip decimal, so serialize -> parse is exact.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "retro/ensembles.hpp"

namespace retro::io {

using Json = nlohmann::json;

/// Structurally malformed file: bad JSON, missing keys, wrong shapes or types.
class FormatError : public InputError {
public:
    using InputError::InputError;
};

Json to_json(linalg::Complex z);
Json to_json(const linalg::Vector& v);
Json to_json(const linalg::Matrix& m);

linalg::Complex complex_from_json(const Json& j, const std::string& where);
linalg::Vector vector_from_json(const Json& j, std::size_t dim, const std::string& where);
linalg::Matrix matrix_from_json(const Json& j, std::size_t dim, const std::string& where);

/// File-level view: keeps pure states as amplitude vectors so they survive a round trip.
struct EnsembleFile {
    using State = std::variant<linalg::Vector, linalg::Matrix>;  // pure | density matrix

    std::size_t dim = 0;
    std::vector<double> priors;
    std::vector<State> states;

    static EnsembleFile from(const Ensemble& e);
    static EnsembleFile from_pure(const std::vector<PureState>& states, std::vector<double> priors);

    /// Validates every invariant first; ValidationError lists each violation.
    Ensemble to_ensemble() const;
    ValidationReport validate() const;
};

struct PovmFile {
    std::size_t dim = 0;
    std::vector<linalg::Matrix> elements;

    static PovmFile from(const Povm& p);
    Povm to_povm() const;
    ValidationReport validate() const;
};

Json to_json(const EnsembleFile& f);
Json to_json(const PovmFile& f);
EnsembleFile ensemble_file_from_json(const Json& j);
PovmFile povm_file_from_json(const Json& j);

EnsembleFile parse_ensemble(const std::string& text);
PovmFile parse_povm(const std::string& text);
std::string serialize(const EnsembleFile& f);
std::string serialize(const PovmFile& f);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Ensemble load_ensemble(const std::filesystem::path& path);
Povm load_povm(const std::filesystem::path& path);

}  // namespace retro::io
