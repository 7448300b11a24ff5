#ifndef HSA_IO_HPP
#define HSA_IO_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "signal.hpp"

namespace hsa {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSpectrumSchemaVersion = 1;

enum class SignalFormat { automatic, csv, wav };

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline SampledSignal parse_csv(std::string_view text, std::optional<double> rate) {
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    bool first = true;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> row;
        bool numeric = true;
        for (auto f : fields) {
            const auto v = parse_number(f);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (first) {  // header
                first = false;
                continue;
            }
            throw ParseError("csv line " + std::to_string(line_no) + ": not a number");
        }
        first = false;
        if (columns == 0) columns = row.size();
        if (row.size() != columns) throw ParseError("csv line " + std::to_string(line_no) + ": column count changes");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv: no samples");
    if (columns > 2) throw ParseError("csv: expected `x` or `t,x` columns");

    std::vector<double> x(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) x[i] = rows[i].back();
    if (columns == 1) {
        if (!rate) throw ContractError("csv: a single column needs an explicit sample rate");
        return SampledSignal(std::move(x), *rate);
    }
    if (rows.size() < 2) throw ParseError("csv: need two rows to infer the sample spacing");
    const double t0 = rows.front()[0];
    const double dt = (rows.back()[0] - t0) / static_cast<double>(rows.size() - 1);
    if (!(dt > 0.0)) throw ParseError("csv: time column must increase");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double step = rows[i][0] - rows[i - 1][0];
        if (std::abs(step - dt) > 1e-6 * dt) throw ParseError("csv: nonuniform time grid at row " + std::to_string(i));
    }
    const double fs = 1.0 / dt;
    if (rate && std::abs(*rate - fs) > 1e-6 * fs) throw ContractError("csv: time column disagrees with the given rate");
    return SampledSignal(std::move(x), rate ? *rate : fs, t0);
}

inline std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

inline SampledSignal parse_wav(std::string_view bytes) {
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t size = bytes.size();
    if (size < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0)
        throw ParseError("wav: not a RIFF/WAVE file");
    std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= size) {
        const std::uint32_t chunk = le32(b + pos + 4);
        const unsigned char* body = b + pos + 8;
        const std::size_t avail = std::min<std::size_t>(chunk, size - pos - 8);
        if (std::memcmp(b + pos, "fmt ", 4) == 0) {
            if (avail < 16) throw ParseError("wav: truncated fmt chunk");
            format = le16(body);
            channels = le16(body + 2);
            rate = le32(body + 4);
            block_align = le16(body + 12);
            bits = le16(body + 14);
            if (format == 0xFFFE) {
                if (avail < 26) throw ParseError("wav: truncated extensible fmt chunk");
                format = le16(body + 24);
            }
        } else if (std::memcmp(b + pos, "data", 4) == 0) {
            data = body;
            data_size = avail;
        }
        pos += 8 + chunk + (chunk & 1u);
    }
    if (format == 0 || !data) throw ParseError("wav: missing fmt or data chunk");
    if (channels == 0 || rate == 0) throw ParseError("wav: bad channel count or sample rate");
    const bool pcm16 = format == 1 && bits == 16;
    const bool pcm24 = format == 1 && bits == 24;
    const bool f32 = format == 3 && bits == 32;
    if (!pcm16 && !pcm24 && !f32) throw ParseError("wav: unsupported encoding (PCM16, PCM24 or float32 only)");
    const std::size_t width = bits / 8;
    if (block_align < width * channels) throw ParseError("wav: inconsistent block alignment");
    const std::size_t frames = data_size / block_align;
    if (frames == 0) throw ParseError("wav: no samples");
    std::vector<double> x(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* p = data + i * block_align;
        if (pcm16) {
            x[i] = static_cast<std::int16_t>(le16(p)) / 32768.0;
        } else if (pcm24) {
            std::int32_t v = static_cast<std::int32_t>(p[0] | p[1] << 8 | p[2] << 16);
            if (v & 0x800000) v -= 0x1000000;
            x[i] = v / 8388608.0;
        } else {
            const std::uint32_t u = le32(p);
            float f;
            std::memcpy(&f, &u, sizeof f);
            x[i] = f;
        }
    }
    return SampledSignal(std::move(x), static_cast<double>(rate));
}

}  // namespace detail

/// Reads a CSV (`x` or `t,x`, optional header) or WAV file (first channel).
/// `rate` is required for one-column CSV; the format defaults to the extension.
inline SampledSignal read_signal(const std::string& path, SignalFormat format = SignalFormat::automatic,
                                 std::optional<double> rate = std::nullopt) {
    if (format == SignalFormat::automatic) {
        std::string ext = path.substr(path.find_last_of('.') == std::string::npos ? path.size() : path.find_last_of('.'));
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        format = ext == ".wav" ? SignalFormat::wav : SignalFormat::csv;
    }
    const std::string text = detail::read_file(path);
    if (text.empty()) throw ParseError(path + ": empty file");
    if (format == SignalFormat::wav) return detail::parse_wav(text);
    return detail::parse_csv(text, rate);
}

/// 17 significant digits, no locale.
inline std::string format_double(double v) {
    if (!std::isfinite(v)) throw ContractError("cannot serialize a non-finite number");
    std::array<char, 32> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return std::string(buf.data(), static_cast<std::size_t>(len));
}

inline void write_csv(const std::string& path, const SampledSignal& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << "t,x\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x.time(static_cast<double>(i))) << ',' << format_double(x[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Spectrum files

struct SpectrumComponent {
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> omega_hz;
    std::vector<double> s;
    double phase_ref = 0.0;
    std::vector<std::size_t> flagged;
};

struct SpectrumFile {
    int schema_version = kSpectrumSchemaVersion;
    std::string tool_version = kToolVersion;
    double sample_rate = 1.0;
    double t0 = 0.0;
    std::size_t length = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<SpectrumComponent> components;
    std::vector<double> residual;

    void validate() const {
        if (residual.size() != length) throw DimensionError("SpectrumFile: residual length differs from length");
        for (const auto& c : components) {
            if (c.t.size() != length || c.a.size() != length || c.omega_hz.size() != length || c.s.size() != length)
                throw DimensionError("SpectrumFile: component arrays must all have the file length");
            for (double w : c.omega_hz)
                if (!std::isfinite(w)) throw ContractError("SpectrumFile: non-finite omega_hz");
            for (auto i : c.flagged)
                if (i >= length) throw ContractError("SpectrumFile: flagged index out of range");
        }
    }
};

/// Packs a spectrum for export; frequencies go from rad/s to Hz.
inline SpectrumFile to_spectrum_file(const HilbertSpectrum& h, nlohmann::json config = nlohmann::json::object()) {
    SpectrumFile f;
    const SampledSignal& r = h.residual;
    f.sample_rate = r.sample_rate();
    f.t0 = r.t0();
    f.length = r.size();
    f.config = std::move(config);
    f.residual = r.values();
    for (const auto& c : h.components) {
        c.validate();
        if (c.ia.size() != f.length) throw DimensionError("to_spectrum_file: component length differs from residual");
        SpectrumComponent sc;
        sc.t.resize(f.length);
        sc.omega_hz.resize(f.length);
        for (std::size_t i = 0; i < f.length; ++i) {
            sc.t[i] = r.time(static_cast<double>(i));
            sc.omega_hz[i] = c.if_[i] / kTwoPi;
        }
        sc.a = c.ia;
        sc.s = c.s;
        sc.phase_ref = c.phase_ref;
        sc.flagged = c.flagged;
        f.components.push_back(std::move(sc));
    }
    f.validate();
    return f;
}

/// Inverse of to_spectrum_file. The quadrature is not stored and comes back as zeros.
inline HilbertSpectrum to_hilbert_spectrum(const SpectrumFile& f) {
    f.validate();
    HilbertSpectrum h{{}, SampledSignal(f.residual, f.sample_rate, f.t0)};
    for (const auto& sc : f.components) {
        AMFMComponent c;
        c.sample_rate = f.sample_rate;
        c.t0 = f.t0;
        c.ia = sc.a;
        c.if_.resize(f.length);
        for (std::size_t i = 0; i < f.length; ++i) c.if_[i] = sc.omega_hz[i] * kTwoPi;
        c.s = sc.s;
        c.sigma.assign(f.length, 0.0);
        c.phase_ref = sc.phase_ref;
        c.flagged = sc.flagged;
        for (double w : c.if_)
            if (w < 0.0) ++c.negative_if_samples;
        h.components.push_back(std::move(c));
    }
    return h;
}

namespace detail {

inline void write_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    out += ']';
}

inline std::vector<double> json_doubles(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string("spectrum: `") + what + "` must be an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ParseError(std::string("spectrum: `") + what + "` holds a non-number");
        v.push_back(e.get<double>());
    }
    return v;
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("spectrum: missing `") + key + "`");
    return *it;
}

}  // namespace detail

inline std::string serialize_spectrum(const SpectrumFile& f) {
    f.validate();
    std::string out;
    out += "{\n";
    out += "  \"schema_version\": " + std::to_string(f.schema_version) + ",\n";
    out += "  \"tool_version\": " + nlohmann::json(f.tool_version).dump() + ",\n";
    out += "  \"frequency_units\": \"Hz (internal rad/s divided by 2*pi)\",\n";
    out += "  \"sample_rate\": " + format_double(f.sample_rate) + ",\n";
    out += "  \"t0\": " + format_double(f.t0) + ",\n";
    out += "  \"length\": " + std::to_string(f.length) + ",\n";
    out += "  \"config\": " + f.config.dump() + ",\n";
    out += "  \"components\": [";
    for (std::size_t k = 0; k < f.components.size(); ++k) {
        const auto& c = f.components[k];
        out += k ? ",\n    {\n" : "\n    {\n";
        out += "      \"phase_ref\": " + format_double(c.phase_ref) + ",\n";
        out += "      \"flagged\": " + nlohmann::json(c.flagged).dump() + ",\n";
        out += "      \"t\": ";
        detail::write_array(out, c.t);
        out += ",\n      \"a\": ";
        detail::write_array(out, c.a);
        out += ",\n      \"omega_hz\": ";
        detail::write_array(out, c.omega_hz);
        out += ",\n      \"s\": ";
        detail::write_array(out, c.s);
        out += "\n    }";
    }
    out += f.components.empty() ? "],\n" : "\n  ],\n";
    out += "  \"residual\": ";
    detail::write_array(out, f.residual);
    out += "\n}\n";
    return out;
}

inline SpectrumFile parse_spectrum(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("spectrum: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("spectrum: top level must be an object");
    const auto& version = detail::field(j, "schema_version");
    if (!version.is_number_integer() || version.get<long long>() != kSpectrumSchemaVersion)
        throw VersionError("spectrum: unsupported schema_version " + version.dump());
    try {
        SpectrumFile f;
        f.tool_version = detail::field(j, "tool_version").get<std::string>();
        f.sample_rate = detail::field(j, "sample_rate").get<double>();
        f.t0 = detail::field(j, "t0").get<double>();
        f.length = detail::field(j, "length").get<std::size_t>();
        f.config = detail::field(j, "config");
        for (const auto& c : detail::field(j, "components")) {
            SpectrumComponent sc;
            sc.phase_ref = detail::field(c, "phase_ref").get<double>();
            sc.flagged = detail::field(c, "flagged").get<std::vector<std::size_t>>();
            sc.t = detail::json_doubles(detail::field(c, "t"), "t");
            sc.a = detail::json_doubles(detail::field(c, "a"), "a");
            sc.omega_hz = detail::json_doubles(detail::field(c, "omega_hz"), "omega_hz");
            sc.s = detail::json_doubles(detail::field(c, "s"), "s");
            f.components.push_back(std::move(sc));
        }
        f.residual = detail::json_doubles(detail::field(j, "residual"), "residual");
        f.validate();
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("spectrum: ") + e.what());
    } catch (const ContractError& e) {
        throw ParseError(e.what());
    }
}

inline void write_spectrum(const std::string& path, const SpectrumFile& f) {
    const std::string text = serialize_spectrum(f);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
    if (!out) throw ParseError("write failed: " + path);
}

inline SpectrumFile read_spectrum(const std::string& path) { return parse_spectrum(detail::read_file(path)); }

}  // namespace hsa

#endif  // HSA_IO_HPP
