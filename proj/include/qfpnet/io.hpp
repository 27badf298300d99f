#ifndef QFPNET_IO_HPP
#define QFPNET_IO_HPP

// Config documents and JSON / CSV output.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfpnet/core.hpp"
#include "qfpnet/montecarlo.hpp"
#include "qfpnet/optimizer.hpp"

namespace qfpnet {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Rounds to 6 significant digits.
inline double sig6(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::strtod(buf, nullptr);
}

inline std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------------------------------------------------------------------------
// ConfigDocument
// ---------------------------------------------------------------------------

struct MonteCarloConfig {
    std::uint64_t m = 100'000;
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 1;
    std::vector<RunConfig> runs;  // optional explicit amplitudes and thresholds
};

struct ConfigDocument {
    ProtocolParams pp;
    ChannelModel ch;
    Encoding encoding = Encoding::SingleBit;
    AmplitudeGrid grid;
    MonteCarloConfig montecarlo;
    std::string hash;  // FNV-1a of the canonical JSON
};

namespace detail {

inline void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + "." + key + ": unknown key");
}

inline double number(const Json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::uint64_t integer(const Json& obj, const std::string& where, const std::string& key) {
    const double v = number(obj, where, key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) throw ConfigError(where + "." + key + ": expected a nonnegative integer");
    const auto& j = obj.at(key);
    return j.is_number_unsigned() ? j.get<std::uint64_t>() : static_cast<std::uint64_t>(v);
}

inline std::vector<double> numbers(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + ": expected a nonempty array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::string position_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class F>
auto guarded(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace detail

inline Encoding parse_encoding(const std::string& s) {
    if (s == "single_bit") return Encoding::SingleBit;
    if (s == "two_bit") return Encoding::TwoBit;
    throw ConfigError("encoding.variant: expected \"single_bit\" or \"two_bit\"");
}

inline ConfigDocument parse_config(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("malformed JSON at " + detail::position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
    detail::check_keys(root, "config", {"schema_version", "protocol", "channel", "encoding", "optimizer", "montecarlo"});
    if (!root.contains("schema_version") || !root["schema_version"].is_number_integer() ||
        root["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));

    ConfigDocument doc;
    if (!root.contains("protocol")) throw ConfigError("protocol: missing");
    const auto& p = root["protocol"];
    detail::check_keys(p, "protocol", {"n", "c", "delta", "epsilon", "N"});
    doc.pp = detail::guarded("protocol", [&] {
        const auto senders = detail::integer(p, "protocol", "N");
        if (senders > 64) throw ConfigError("protocol.N: too many senders");
        return ProtocolParams::make(detail::integer(p, "protocol", "n"), detail::number(p, "protocol", "c"),
                                    detail::number(p, "protocol", "delta"), detail::number(p, "protocol", "epsilon"),
                                    static_cast<int>(senders));
    });

    if (!root.contains("channel")) throw ConfigError("channel: missing");
    const auto& c = root["channel"];
    detail::check_keys(c, "channel", {"sqrt_eta", "eta", "dark_count", "visibility"});
    if (c.contains("sqrt_eta") == c.contains("eta")) throw ConfigError("channel: give exactly one of sqrt_eta and eta");
    const double dark = detail::number(c, "channel", "dark_count");
    const double nu = c.contains("visibility") ? detail::number(c, "channel", "visibility") : 1.0;
    doc.ch = detail::guarded("channel", [&] {
        if (c.contains("eta")) {
            const auto& e = c["eta"];
            if (e.is_number()) return ChannelModel::symmetric_channel(doc.pp.senders, e.get<double>(), dark, nu);
            return ChannelModel::make(detail::numbers(e, "channel.eta"), dark, nu);
        }
        return ChannelModel::from_sqrt_eta(detail::numbers(c["sqrt_eta"], "channel.sqrt_eta"), dark, nu);
    });
    if (doc.ch.senders() != doc.pp.senders) throw ConfigError("channel: one transmissivity per sender required");

    if (root.contains("encoding")) {
        const auto& e = root["encoding"];
        detail::check_keys(e, "encoding", {"variant"});
        if (!e.contains("variant") || !e["variant"].is_string()) throw ConfigError("encoding.variant: expected a string");
        doc.encoding = parse_encoding(e["variant"].get<std::string>());
        detail::guarded("encoding", [&] { return EncodingScheme::make(doc.encoding, doc.pp.m); });
    }

    if (root.contains("optimizer")) {
        const auto& o = root["optimizer"];
        detail::check_keys(o, "optimizer", {"bounds", "grid"});
        if (o.contains("bounds")) {
            const auto b = detail::numbers(o["bounds"], "optimizer.bounds");
            if (b.size() != 2) throw ConfigError("optimizer.bounds: expected [lower, upper]");
            doc.grid.lower = b[0];
            doc.grid.upper = b[1];
        }
        if (o.contains("grid")) doc.grid.points = static_cast<int>(detail::integer(o, "optimizer", "grid"));
        detail::guarded("optimizer", [&] {
            doc.grid.validate();
            return 0;
        });
    }

    if (root.contains("montecarlo")) {
        const auto& mc = root["montecarlo"];
        detail::check_keys(mc, "montecarlo", {"m", "trials", "seed", "runs"});
        if (mc.contains("m")) doc.montecarlo.m = detail::integer(mc, "montecarlo", "m");
        if (mc.contains("trials")) doc.montecarlo.trials = detail::integer(mc, "montecarlo", "trials");
        if (mc.contains("seed")) doc.montecarlo.seed = detail::integer(mc, "montecarlo", "seed");
        if (doc.montecarlo.m < 10) throw ConfigError("montecarlo.m: must be >= 10");
        if (doc.montecarlo.trials < 1) throw ConfigError("montecarlo.trials: must be >= 1");
        if (mc.contains("runs")) {
            const auto& runs = mc["runs"];
            if (!runs.is_array()) throw ConfigError("montecarlo.runs: expected an array");
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const std::string where = "montecarlo.runs[" + std::to_string(r) + "]";
                detail::check_keys(runs[r], where, {"alphas", "thresholds"});
                RunConfig rc;
                rc.alphas = detail::numbers(runs[r].value("alphas", Json()), where + ".alphas");
                for (double t : detail::numbers(runs[r].value("thresholds", Json()), where + ".thresholds")) {
                    if (t < 0 || t != std::floor(t)) throw ConfigError(where + ".thresholds: expected nonnegative integers");
                    rc.thresholds.push_back(static_cast<std::int64_t>(t));
                }
                doc.montecarlo.runs.push_back(std::move(rc));
            }
        }
    }
    doc.hash = hex64(fnv1a(root.dump()));
    return doc;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline OrderedJson meta_header(const std::string& command, const std::string& config_hash) {
    OrderedJson m;
    m["artifact"] = "qfpnet";
    m["version"] = kVersion;
    m["command"] = command;
    m["config_hash"] = config_hash;
    return m;
}

inline OrderedJson sig6_array(const std::vector<double>& v) {
    OrderedJson a = OrderedJson::array();
    for (double x : v) a.push_back(sig6(x));
    return a;
}

inline OrderedJson to_json(const RunConfig& rc) {
    OrderedJson j;
    j["alphas"] = sig6_array(rc.alphas);
    j["mean_photons"] = sig6_array([&] {
        std::vector<double> mu;
        for (double a : rc.alphas) mu.push_back(a * a);
        return mu;
    }());
    j["pairing"] = rc.pairing;
    j["thresholds"] = rc.thresholds;
    j["encoding"] = to_string(rc.encoding.variant);
    j["pulses"] = rc.encoding.pulses_per_codeword;
    return j;
}

inline OrderedJson to_json(const OptimizationResult& r, bool with_trace = true) {
    OrderedJson j;
    j["feasible"] = r.feasible;
    j["q_r"] = sig6(r.q_r);
    j["p_e"] = sig6(r.p_e);
    OrderedJson runs = OrderedJson::array();
    for (std::size_t k = 0; k < r.per_run.size(); ++k) {
        auto rj = to_json(r.per_run[k]);
        rj["run"] = k + 1;
        if (k < r.run_p_e.size()) rj["p_e"] = sig6(r.run_p_e[k]);
        runs.push_back(rj);
    }
    j["per_run"] = runs;
    if (with_trace) {
        OrderedJson t;
        t["evaluations"] = r.trace.evaluations;
        OrderedJson entries = OrderedJson::array();
        for (const auto& e : r.trace.entries)
            entries.push_back({{"run", e.run}, {"stage", e.stage}, {"alphas", sig6_array(e.alphas)},
                               {"q", sig6(e.q)}, {"p_e", sig6(e.p_e)}, {"feasible", e.feasible}});
        t["entries"] = entries;
        j["trace"] = t;
    }
    return j;
}

inline OrderedJson to_json(const TrialReport& r) {
    OrderedJson j;
    j["trials"] = r.trials;
    j["correct"] = r.correct;
    j["incorrect"] = r.incorrect;
    j["inconsistent"] = r.inconsistent;
    j["empirical_correct_rate"] = sig6(r.empirical_correct_rate);
    j["empirical_incorrect_rate"] = sig6(r.empirical_incorrect_rate);
    j["empirical_inconsistent_rate"] = sig6(r.empirical_inconsistent_rate);
    j["mean_runs_used"] = sig6(r.mean_runs_used);
    j["wilson_interval"] = {sig6(r.wilson_interval.lower), sig6(r.wilson_interval.upper)};
    OrderedJson stats = OrderedJson::array();
    for (const auto& s : r.per_detector_count_stats)
        stats.push_back({{"run", s.run}, {"detector", s.detector}, {"samples", s.samples}, {"mean", sig6(s.mean)},
                         {"variance", sig6(s.variance)}, {"expected_mean", sig6(s.expected_mean)}});
    j["per_detector_count_stats"] = stats;
    return j;
}

// Minimal CSV writer: header row, LF endings, quoting where needed.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CsvWriter: wrong number of cells");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ += ',';
            out_ += quote(cells[k]);
        }
        out_ += '\n';
    }

    void comment(const std::string& line) { out_ += "# " + line + '\n'; }

    const std::string& str() const { return out_; }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + '"';
    }

    std::size_t columns_;
    std::string out_;
};

}  // namespace qfpnet

#endif
