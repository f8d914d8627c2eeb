#include "anisoflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace anisoflow {
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

class PgmCursor {
public:
    explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (is_space(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long integer(const char* what) {
        skip_separators();
        std::size_t start = pos_;
        long v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1L << 40) throw PgmParseError(std::string(what) + " too large", start);
            ++pos_;
        }
        if (pos_ == start) throw PgmParseError(std::string("expected ") + what, start);
        return v;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    unsigned char byte(std::size_t k) const { return static_cast<unsigned char>(bytes_[pos_ + k]); }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }
    char peek() const { return bytes_[pos_]; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

double parse_double(std::string_view s, const std::string& key) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("", "invalid number for '" + key + "': '" + std::string(s) + "'");
    return v;
}

int parse_int(std::string_view s, const std::string& key) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("", "invalid integer for '" + key + "': '" + std::string(s) + "'");
    return v;
}

std::string resolve(std::string_view value, const fs::path& base) {
    if (value.empty()) return {};
    fs::path p(value);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal().string();
}

}  // namespace

void ImageBuffer::validate() const {
    if (width < 1 || height < 1) throw ValidationError("", "image dimensions must be positive");
    if (intensities.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ValidationError("", "image has " + std::to_string(intensities.size()) +
                                      " intensities for " + std::to_string(width) + "x" +
                                      std::to_string(height) + " pixels");
    for (double v : intensities)
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("", "image intensities must lie in [0, 1]");
}

ImageBuffer parse_pgm(std::string_view bytes) {
    PgmCursor cur(bytes);
    if (bytes.size() < 2 || bytes[0] != 'P') throw PgmParseError("missing PGM magic number", 0);
    bool ascii;
    if (bytes[1] == '2') ascii = true;
    else if (bytes[1] == '5') ascii = false;
    else throw PgmParseError(std::string("unsupported magic number P") + bytes[1], 0);
    cur.advance(2);

    std::size_t at = cur.pos();
    long width = cur.integer("width");
    long height = cur.integer("height");
    if (width < 1 || height < 1) throw PgmParseError("image dimensions must be positive", at);
    at = cur.pos();
    long maxval = cur.integer("maxval");
    if (maxval < 1 || maxval > 65535) throw PgmParseError("maxval must lie in [1, 65535]", at);

    ImageBuffer img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    img.intensities.resize(n);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (ascii) {
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t here = cur.pos();
            long v = cur.integer("pixel value");
            if (v > maxval) throw PgmParseError("pixel value exceeds maxval", here);
            img.intensities[k] = static_cast<double>(v) * scale;
        }
    } else {
        if (cur.at_end() || !is_space(cur.peek()))
            throw PgmParseError("expected whitespace after maxval", cur.pos());
        cur.advance(1);
        const std::size_t bpp = maxval > 255 ? 2 : 1;
        if (cur.remaining() < n * bpp) throw PgmParseError("truncated pixel data", bytes.size());
        for (std::size_t k = 0; k < n; ++k) {
            long v = bpp == 2 ? (long{cur.byte(2 * k)} << 8) | cur.byte(2 * k + 1) : long{cur.byte(k)};
            if (v > maxval) throw PgmParseError("pixel value exceeds maxval", cur.pos() + k * bpp);
            img.intensities[k] = static_cast<double>(v) * scale;
        }
    }
    return img;
}

ImageBuffer load_pgm(const fs::path& path) { return parse_pgm(read_file(path)); }

std::string encode_pgm(const ImageBuffer& img, int maxval, bool ascii) {
    img.validate();
    if (maxval < 1 || maxval > 65535) throw ValidationError("", "maxval must lie in [1, 65535]");
    std::string out = (ascii ? "P2\n" : "P5\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
    const auto quantize = [maxval](double v) {
        double q = std::floor(v * maxval + 0.5);
        return static_cast<long>(std::clamp(q, 0.0, static_cast<double>(maxval)));
    };
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            long q = quantize(img.intensities[static_cast<std::size_t>(y) * img.width + x]);
            if (ascii) {
                if (x > 0) out += ' ';
                out += std::to_string(q);
            } else if (maxval > 255) {
                out += static_cast<char>((q >> 8) & 0xff);
                out += static_cast<char>(q & 0xff);
            } else {
                out += static_cast<char>(q);
            }
        }
        if (ascii) out += '\n';
    }
    return out;
}

void save_pgm(const ImageBuffer& img, const fs::path& path, int maxval, bool ascii) {
    write_file_atomic(path, encode_pgm(img, maxval, ascii));
}

ScalarField field_from_image(const ImageBuffer& img) {
    img.validate();
    GridSpec grid = GridSpec::unit_square(img.width, img.height);
    ScalarField f(grid);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            f(x, y) = img.intensities[static_cast<std::size_t>(y) * img.width + x];
    return f;
}

ImageBuffer image_from_field(const ScalarField& f, bool clamp) {
    const GridSpec& g = f.grid();
    ImageBuffer img;
    img.width = g.nx();
    img.height = g.ny();
    img.intensities.resize(g.node_count());
    for (int y = 0; y < g.ny(); ++y) {
        for (int x = 0; x < g.nx(); ++x) {
            double v = f(x, y);
            if (clamp) v = std::clamp(v, 0.0, 1.0);
            img.intensities[static_cast<std::size_t>(y) * img.width + x] = v;
        }
    }
    return img;
}

OrientationImage orientation_image(const ScalarField& alpha) {
    if (!alpha.all_finite()) throw NumericError("orientation field has non-finite values");
    OrientationImage out;
    out.min = alpha.min();
    out.max = alpha.max();
    ScalarField scaled(alpha.grid());
    const double span = out.max - out.min;
    if (span > 0.0) {
        for (std::size_t k = 0; k < scaled.size(); ++k)
            scaled[k] = std::clamp((alpha[k] - out.min) / span, 0.0, 1.0);
    }
    out.image = image_from_field(scaled, false);
    return out;
}

std::string format_range_sidecar(double min, double max) { return fmt(min) + " " + fmt(max) + "\n"; }

std::pair<double, double> parse_range_sidecar(std::string_view text) {
    std::istringstream in{std::string(text)};
    double lo = 0.0, hi = 0.0;
    if (!(in >> lo >> hi)) throw IoError("malformed range sidecar");
    return {lo, hi};
}

namespace {
constexpr const char* kTraceHeader =
    "step,t,E_alpha,E_p,E_aniso,E_fid,E_total,diss_l2,diss_h1,ineq_slack,res_alpha,res_u";
}

std::string format_energy_trace_csv(const std::vector<EnergyTraceRow>& rows) {
    std::string out = std::string(kTraceHeader) + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.step);
        for (double v : {r.t, r.energy.dirichlet_alpha, r.energy.p_term, r.energy.aniso_term,
                         r.energy.fidelity, r.energy.total, r.diss_l2, r.diss_h1, r.ineq_slack,
                         r.res_alpha, r.res_u}) {
            out += ',';
            out += fmt(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<EnergyTraceRow> parse_energy_trace_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || trim(line) != kTraceHeader)
        throw IoError("energy trace: unexpected header");
    std::vector<EnergyTraceRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 12)
            throw IoError("energy trace line " + std::to_string(lineno) + ": expected 12 columns");
        try {
            EnergyTraceRow r;
            r.step = parse_int(cells[0], "step");
            double* dst[] = {&r.t, &r.energy.dirichlet_alpha, &r.energy.p_term, &r.energy.aniso_term,
                             &r.energy.fidelity, &r.energy.total, &r.diss_l2, &r.diss_h1,
                             &r.ineq_slack, &r.res_alpha, &r.res_u};
            for (std::size_t k = 0; k < 11; ++k) *dst[k] = parse_double(cells[k + 1], "column");
            rows.push_back(r);
        } catch (const ValidationError& e) {
            throw IoError("energy trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into '" + path.string() + "'");
    }
}

void RunConfig::validate() const {
    model.validate();
    solver.validate();
    (void)anisotropy();
    for (const auto& [name, v] : {std::pair{"c_poincare", c_poincare}, std::pair{"c_sob_1", c_sob_1},
                                  std::pair{"c_sob_2", c_sob_2}, std::pair{"gamma_w1inf", gamma_w1inf}})
        if (v && !(*v > 0.0 && std::isfinite(*v)))
            throw ValidationError("", std::string(name) + " must be > 0");
    if (input.empty()) throw ValidationError("", "no input image configured");
}

Anisotropy RunConfig::anisotropy() const {
    auto fam = parse_family(family);
    if (!fam) throw ValidationError("A2", "unknown anisotropy family '" + family + "'");
    switch (*fam) {
        case AnisotropyFamily::smoothed_l1: return Anisotropy::smoothed_l1(epsilon);
        case AnisotropyFamily::smoothed_ngon: return Anisotropy::smoothed_ngon(n_dirs, epsilon, weights);
        case AnisotropyFamily::smoothed_euclid: return Anisotropy::smoothed_euclid(epsilon);
    }
    throw ValidationError("A2", "unknown anisotropy family");
}

EmbeddingConstants RunConfig::embeddings(const GridSpec& grid) const {
    EmbeddingConstants e = default_embedding_constants(grid, model.p);
    if (c_poincare) e.c_poincare = *c_poincare;
    if (c_sob_1) e.c_sob_1 = *c_sob_1;
    if (c_sob_2) e.c_sob_2 = *c_sob_2;
    e.user_supplied = c_poincare && c_sob_1 && c_sob_2;
    return e;
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("", "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (seen[key]) throw ValidationError("", "config key '" + key + "' given twice");
        seen[key] = true;

        auto num = [&] { return parse_double(value, key); };
        auto integer = [&] { return parse_int(value, key); };

        if (key == "kappa") cfg.model.kappa = num();
        else if (key == "mu") cfg.model.mu = num();
        else if (key == "nu") cfg.model.nu = num();
        else if (key == "lambda") cfg.model.lambda = num();
        else if (key == "p") cfg.model.p = num();
        else if (key == "tau") cfg.model.tau = num();
        else if (key == "t_final") cfg.model.t_final = num();
        else if (key == "anisotropy" || key == "family") cfg.family = std::string(value);
        else if (key == "epsilon") cfg.epsilon = num();
        else if (key == "n_dirs") cfg.n_dirs = integer();
        else if (key == "weights") {
            cfg.weights.clear();
            std::string_view rest = value;
            while (!rest.empty()) {
                auto sep = rest.find_first_of(", ");
                std::string_view item = rest.substr(0, sep);
                if (!trim(item).empty()) cfg.weights.push_back(parse_double(item, key));
                if (sep == std::string_view::npos) break;
                rest.remove_prefix(sep + 1);
            }
        }
        else if (key == "tol_res") cfg.solver.tol_res = num();
        else if (key == "max_outer") cfg.solver.max_outer = integer();
        else if (key == "max_inner") cfg.solver.max_inner = integer();
        else if (key == "armijo_c") cfg.solver.armijo_c = num();
        else if (key == "backtrack") cfg.solver.backtrack = num();
        else if (key == "init_step") cfg.solver.init_step = num();
        else if (key == "lbfgs_memory") cfg.solver.lbfgs_memory = integer();
        else if (key == "tol_energy_rel") cfg.solver.tol_energy_rel = num();
        else if (key == "bound_tol") cfg.solver.bound_tol = num();
        else if (key == "c_poincare") cfg.c_poincare = num();
        else if (key == "c_sob_1") cfg.c_sob_1 = num();
        else if (key == "c_sob_2") cfg.c_sob_2 = num();
        else if (key == "gamma_w1inf") cfg.gamma_w1inf = num();
        else if (key == "input") cfg.input = resolve(value, base_dir);
        else if (key == "u0") cfg.u0 = resolve(value, base_dir);
        else if (key == "output_dir") cfg.output_dir = resolve(value, base_dir);
        else throw ValidationError("", "unknown config key '" + key + "'");
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    return parse_config(read_file(path), path.parent_path());
}

std::string format_conditions_csv(const ConditionReport& r) {
    const auto& in = r.inputs;
    std::vector<std::pair<std::string, double>> rows = {
        {"p", in.p},
        {"nu", in.nu},
        {"mu", in.mu},
        {"kappa", in.kappa},
        {"tau", in.tau},
        {"gamma_w1inf", in.gamma_w1inf},
        {"grad_u0_lp", in.grad_u_lp},
        {"energy0", in.energy0},
        {"c_poincare", in.emb.c_poincare},
        {"c_sob_1", in.emb.c_sob_1},
        {"c_sob_2", in.emb.c_sob_2},
        {"embeddings_user_supplied", in.emb.user_supplied ? 1.0 : 0.0},
        {"c1", r.c1},
        {"c1_proof", r.c1_proof},
        {"c2", r.c2},
        {"c2_proof", r.c2_proof},
        {"kappa_hat", r.kappa_hat},
        {"tau_hat", r.tau_hat},
        {"kappa_hat_alt", r.kappa_hat_alt},
        {"tau_hat_alt", r.tau_hat_alt},
        {"alpha0_unique_bound", r.alpha0_unique_bound},
        {"kappa_ok", r.kappa_ok ? 1.0 : 0.0},
        {"tau_ok", r.tau_ok ? 1.0 : 0.0},
        {"kappa_ok_alt", r.kappa_ok_alt ? 1.0 : 0.0},
        {"tau_ok_alt", r.tau_ok_alt ? 1.0 : 0.0},
        {"alpha0_unique", r.alpha0_unique ? 1.0 : 0.0},
    };
    std::string out = "name,value\n";
    for (const auto& [name, v] : rows) out += name + "," + fmt(v) + "\n";
    return out;
}

std::string format_conditions_text(const ConditionReport& r) {
    const auto& in = r.inputs;
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::ostringstream os;
    os << "inputs\n"
       << "  p = " << fmt(in.p) << "\n  nu = " << fmt(in.nu) << "\n  mu = " << fmt(in.mu)
       << "\n  kappa = " << fmt(in.kappa) << "\n  tau = " << fmt(in.tau)
       << "\n  |grad gamma|_W1inf = " << fmt(in.gamma_w1inf) << "\n  |grad u0|_Lp = " << fmt(in.grad_u_lp)
       << "\n  E(0, u0) = " << fmt(in.energy0) << "\n"
       << "embedding constants (" << (in.emb.user_supplied ? "user supplied" : "includes built-in upper-bound surrogates")
       << ")\n  C_P = " << fmt(in.emb.c_poincare) << "\n  C_sob(2p/(p-2)) = " << fmt(in.emb.c_sob_1)
       << "\n  C_sob(2p/(p-1)) = " << fmt(in.emb.c_sob_2) << "\n"
       << "constants\n"
       << "  C1 (|grad u|^2 form) = " << fmt(r.c1) << "\n  C1 ((1+|grad u|)^2 form) = " << fmt(r.c1_proof)
       << "\n  C2 = " << fmt(r.c2) << "\n  C2 ((1+|grad u|)^2 form) = " << fmt(r.c2_proof)
       << "\n  kappa_hat = " << fmt(r.kappa_hat) << "\n  tau_hat = " << fmt(r.tau_hat)
       << "\n  kappa_hat (alternative energy bound) = " << fmt(r.kappa_hat_alt)
       << "\n  tau_hat (alternative energy bound) = " << fmt(r.tau_hat_alt)
       << "\n  alpha0 uniqueness bound = " << fmt(r.alpha0_unique_bound) << "\n"
       << "conditions\n"
       << "  kappa > kappa_hat: " << yn(r.kappa_ok) << "\n  tau < tau_hat: " << yn(r.tau_ok)
       << "\n  kappa > kappa_hat (alternative): " << yn(r.kappa_ok_alt)
       << "\n  tau < tau_hat (alternative): " << yn(r.tau_ok_alt)
       << "\n  alpha0 unique: " << yn(r.alpha0_unique) << "\n";
    return os.str();
}

std::string format_jtrace_csv(const JTrace& trace) {
    std::string out = "step,t,J,alpha_gap\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        out += std::to_string(i) + "," + fmt(trace.times[i]) + "," + fmt(trace.j_values[i]) + "," +
               fmt(trace.alpha_gap[i]) + "\n";
    return out;
}

}  // namespace anisoflow
