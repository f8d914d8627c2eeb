#pragma once

// Images (PGM P2/P5), run configuration files, energy-trace CSV and the
// orientation range sidecar.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anisoflow/errors.hpp"
#include "anisoflow/solver.hpp"
#include "anisoflow/theory.hpp"

namespace anisoflow {

struct ImageBuffer {
    int width = 0;
    int height = 0;
    /// Row-major, top row first, each in [0, 1].
    std::vector<double> intensities;

    /// Throws ValidationError if sizes disagree or an intensity leaves [0, 1].
    void validate() const;
};

/// Malformed PGM data; `offset` is the byte position where parsing failed.
class PgmParseError : public IoError {
public:
    PgmParseError(const std::string& what, std::size_t offset)
        : IoError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

ImageBuffer parse_pgm(std::string_view bytes);
ImageBuffer load_pgm(const std::filesystem::path& path);

/// Quantizes to floor(v * maxval + 0.5). P5 (binary) unless `ascii`.
std::string encode_pgm(const ImageBuffer& img, int maxval = 255, bool ascii = false);
void save_pgm(const ImageBuffer& img, const std::filesystem::path& path, int maxval = 255,
              bool ascii = false);

/// Pixel (x, y) becomes node (x, y) of a grid that fits the unit square.
ScalarField field_from_image(const ImageBuffer& img);
/// Values are clamped to [0, 1] when `clamp` is set, for export only.
ImageBuffer image_from_field(const ScalarField& f, bool clamp = true);

struct OrientationImage {
    ImageBuffer image;
    double min = 0.0;
    double max = 0.0;
};
/// Affine map [min alpha, max alpha] -> [0, 1]; a constant field maps to 0.
OrientationImage orientation_image(const ScalarField& alpha);
std::string format_range_sidecar(double min, double max);
std::pair<double, double> parse_range_sidecar(std::string_view text);

std::string format_energy_trace_csv(const std::vector<EnergyTraceRow>& rows);
/// Throws IoError on a malformed trace.
std::vector<EnergyTraceRow> parse_energy_trace_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

struct RunConfig {
    ModelParams model;
    std::string family = "smoothed-l1";
    double epsilon = 0.1;
    int n_dirs = 4;
    std::vector<double> weights;
    SolveConfig solver;

    std::optional<double> c_poincare;
    std::optional<double> c_sob_1;
    std::optional<double> c_sob_2;
    std::optional<double> gamma_w1inf;

    std::string input;
    std::string u0;  // empty: u0 = u_org
    std::string output_dir = ".";

    /// Throws ValidationError naming the violated assumption.
    void validate() const;
    Anisotropy anisotropy() const;
    /// Overrides on top of the built-in surrogates for `grid`.
    EmbeddingConstants embeddings(const GridSpec& grid) const;
};

/// key = value lines, '#' starts a comment. Relative paths are resolved
/// against `base_dir`. Throws ValidationError on unknown keys or bad values.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

std::string format_conditions_csv(const ConditionReport& report);
std::string format_conditions_text(const ConditionReport& report);
std::string format_jtrace_csv(const JTrace& trace);

}  // namespace anisoflow
