#ifndef HPLAB_PIPELINE_HPP
#define HPLAB_PIPELINE_HPP

// End-to-end runs: series -> solve -> order check -> roots -> analysis ->
// figures, with a series cache and a hashed manifest of every artifact.

#include "analysis.hpp"
#include "linear.hpp"
#include "presets.hpp"
#include "roots.hpp"
#include "series.hpp"
#include "svg.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hplab
{

inline constexpr const char *tool_version = "1.0.0";

inline std::string sha256_hex(const std::string &data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return out.str();
}

class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig
{
    std::string label = "run";
    SystemKind mode = SystemKind::hermite_pade;
    std::vector<FunctionSpec> specs;
    std::vector<int> degrees;
    std::optional<long> digits;
    long digits_per_degree = 30;
    long min_digits = 256;
    std::filesystem::path output = "out";
    std::optional<std::filesystem::path> cache_dir;
    unsigned workers = 1;
    bool analysis = true;
    DetectorThresholds detector;
    std::optional<GridSpec> potential;
    bool plots = true;
    PlotSpec plot;

    /// Working precision for degree n. Values below the 64-digit floor are
    /// not clamped; the affected degrees fail with a diagnosis.
    long digits_for(int n) const
    {
        if (digits) {
            return *digits;
        }
        return std::max(min_digits, digits_per_degree * static_cast<long>(n));
    }

    std::filesystem::path cache_path() const { return cache_dir ? *cache_dir : output / "cache"; }

    void validate() const
    {
        const std::size_t need = mode == SystemKind::pade ? 1 : 2;
        if (specs.size() != need) {
            throw ConfigError("mode " + to_string(mode) + " needs " + std::to_string(need) + " function specs, got "
                              + std::to_string(specs.size()));
        }
        if (mode == SystemKind::two_point
            && (specs[0].expansion_point != ExpansionPoint::zero || specs[1].expansion_point != ExpansionPoint::infinity)) {
            throw ConfigError("two_point mode needs specs expanded at zero and at infinity, in that order");
        }
        if (mode != SystemKind::two_point) {
            for (const auto &s : specs) {
                if (s.expansion_point != ExpansionPoint::infinity) {
                    throw ConfigError("spec '" + s.label + "' must be expanded at infinity");
                }
            }
        }
        if (degrees.empty()) {
            throw ConfigError("no degrees given");
        }
        for (int n : degrees) {
            if (n < 0) {
                throw ConfigError("negative degree " + std::to_string(n));
            }
        }
        if (digits && *digits < Precision::min_digits) {
            throw ConfigError("digits must be at least " + std::to_string(Precision::min_digits));
        }
        if (workers == 0) {
            throw ConfigError("workers must be positive");
        }
        if (label.empty() || label.find_first_of("/\\ ") != std::string::npos) {
            throw ConfigError("label must be a non-empty file-name token");
        }
        try {
            for (const auto &s : specs) {
                s.validate();
            }
            plot.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    }
};

inline std::vector<int> parse_degrees(const nlohmann::json &j)
{
    std::vector<int> out;
    if (j.is_number_integer()) {
        out.push_back(j.get<int>());
    } else if (j.is_array()) {
        for (const auto &v : j) {
            out.push_back(v.get<int>());
        }
    } else if (j.is_object()) {
        const int lo = j.at("from").get<int>();
        const int hi = j.at("to").get<int>();
        const int step = j.value("step", 1);
        if (step <= 0 || hi < lo) {
            throw ConfigError("bad degree span");
        }
        for (int n = lo; n <= hi; n += step) {
            out.push_back(n);
        }
    } else if (j.is_string()) {
        // "a..b" or "a,b,c"
        const std::string s = j.get<std::string>();
        const auto dots = s.find("..");
        try {
            if (dots != std::string::npos) {
                const int lo = std::stoi(s.substr(0, dots));
                const int hi = std::stoi(s.substr(dots + 2));
                for (int n = lo; n <= hi; ++n) {
                    out.push_back(n);
                }
            } else {
                std::stringstream in(s);
                std::string tok;
                while (std::getline(in, tok, ',')) {
                    out.push_back(std::stoi(tok));
                }
            }
        } catch (const std::logic_error &) {
            throw ConfigError("bad degree list '" + s + "'");
        }
    } else {
        throw ConfigError("degrees must be a number, list, span object or string");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline RunConfig config_from_json(const nlohmann::json &j)
{
    RunConfig c;
    try {
        if (j.contains("preset")) {
            const Preset p = find_preset(j.at("preset").get<std::string>());
            c.label = p.name;
            c.mode = p.mode;
            c.specs = p.specs;
            c.plot.re_min = p.re_min;
            c.plot.re_max = p.re_max;
            c.plot.im_min = p.im_min;
            c.plot.im_max = p.im_max;
            c.plot.annotations = p.marks;
        }
        c.label = j.value("label", c.label);
        if (j.contains("mode")) {
            c.mode = system_kind_from_string(j.at("mode").get<std::string>());
        }
        if (j.contains("specs")) {
            c.specs = j.at("specs").get<std::vector<FunctionSpec>>();
        }
        if (j.contains("degrees")) {
            c.degrees = parse_degrees(j.at("degrees"));
        }
        if (j.contains("digits") && !j.at("digits").is_null()) {
            c.digits = j.at("digits").get<long>();
        }
        c.digits_per_degree = j.value("digits_per_degree", c.digits_per_degree);
        c.min_digits = j.value("min_digits", c.min_digits);
        c.output = j.value("output", c.output.string());
        if (j.contains("cache_dir")) {
            c.cache_dir = j.at("cache_dir").get<std::string>();
        }
        c.workers = j.value("workers", c.workers);
        if (j.contains("analysis")) {
            const auto &a = j.at("analysis");
            c.analysis = a.value("enabled", true);
            if (a.contains("detector")) {
                c.detector = a.at("detector").get<DetectorThresholds>();
            }
            if (a.contains("potential_grid") && !a.at("potential_grid").is_null()) {
                const auto &g = a.at("potential_grid");
                GridSpec gs;
                gs.re_min = g.value("re_min", gs.re_min);
                gs.re_max = g.value("re_max", gs.re_max);
                gs.im_min = g.value("im_min", gs.im_min);
                gs.im_max = g.value("im_max", gs.im_max);
                gs.nx = g.value("nx", gs.nx);
                gs.ny = g.value("ny", gs.ny);
                gs.clearance = g.value("clearance", gs.clearance);
                c.potential = gs;
            }
        }
        if (j.contains("plots")) {
            const auto &p = j.at("plots");
            c.plots = p.value("enabled", true);
            if (p.contains("viewport")) {
                const auto v = p.at("viewport").get<std::vector<double>>();
                if (v.size() != 4) {
                    throw ConfigError("viewport needs [re_min, re_max, im_min, im_max]");
                }
                c.plot.re_min = v[0];
                c.plot.re_max = v[1];
                c.plot.im_min = v[2];
                c.plot.im_max = v[3];
            }
            c.plot.marker_radius = p.value("marker_radius", c.plot.marker_radius);
            c.plot.size = p.value("size", c.plot.size);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.plot.families = c.mode == SystemKind::hermite_pade ? std::vector<int>{0, 1, 2} : std::vector<int>{0, 1};
    c.plot.allow_empty = true;
    c.validate();
    return c;
}

inline RunConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

/// Canonical echo of a config; everything needed to re-derive the outputs.
inline nlohmann::json to_json(const RunConfig &c)
{
    nlohmann::json potential = nullptr;
    if (c.potential) {
        const auto &g = *c.potential;
        potential = {{"re_min", g.re_min}, {"re_max", g.re_max}, {"im_min", g.im_min}, {"im_max", g.im_max},
                     {"nx", g.nx},         {"ny", g.ny},         {"clearance", g.clearance}};
    }
    return {{"label", c.label},
            {"mode", to_string(c.mode)},
            {"specs", c.specs},
            {"degrees", c.degrees},
            {"digits", c.digits ? nlohmann::json(*c.digits) : nlohmann::json(nullptr)},
            {"digits_per_degree", c.digits_per_degree},
            {"min_digits", c.min_digits},
            {"analysis", {{"enabled", c.analysis}, {"detector", c.detector}, {"potential_grid", potential}}},
            {"plots",
             {{"enabled", c.plots},
              {"viewport", {c.plot.re_min, c.plot.re_max, c.plot.im_min, c.plot.im_max}},
              {"marker_radius", c.plot.marker_radius},
              {"size", c.plot.size}}}};
}

/// Series cache keyed by (canonical spec, digits). The longest series
/// computed so far is kept and sliced; entries are stored in exact
/// hexadecimal so cached and fresh series are bit-identical.
class SeriesCache
{
public:
    explicit SeriesCache(std::optional<std::filesystem::path> dir) : m_dir(std::move(dir)) {}

    static std::string key(const FunctionSpec &spec, long digits)
    {
        return sha256_hex(canonical_json(spec) + "|" + std::to_string(digits));
    }

    /// Series with `length` coefficients.
    Series get(const FunctionSpec &spec, std::size_t length, const Precision &prec)
    {
        const std::string k = key(spec, prec.digits());
        std::mutex *slot = nullptr;
        {
            std::lock_guard lock(m_mutex);
            slot = &m_slots[k];
        }
        std::lock_guard entry_lock(*slot);
        {
            std::lock_guard lock(m_mutex);
            auto it = m_mem.find(k);
            if (it != m_mem.end() && it->second.size() >= length) {
                ++m_hits;
                return it->second.head(length);
            }
        }
        if (auto s = load(k, spec, prec); s && s->size() >= length) {
            std::lock_guard lock(m_mutex);
            ++m_hits;
            m_mem.insert_or_assign(k, *s);
            return s->head(length);
        }
        Series s = build_function_series(spec, length - 1, prec);
        store(k, spec, s);
        std::lock_guard lock(m_mutex);
        ++m_misses;
        m_mem.insert_or_assign(k, s);
        return s;
    }

    std::size_t hits() const { return m_hits; }
    std::size_t misses() const { return m_misses; }

private:
    std::optional<Series> load(const std::string &k, const FunctionSpec &spec, const Precision &prec) const
    {
        if (!m_dir) {
            return std::nullopt;
        }
        std::ifstream in(*m_dir / (k + ".json"));
        if (!in) {
            return std::nullopt;
        }
        try {
            nlohmann::json j;
            in >> j;
            if (j.at("spec") != nlohmann::json(spec) || j.at("digits").get<long>() != prec.digits()) {
                return std::nullopt;
            }
            const auto &re = j.at("re");
            const auto &im = j.at("im");
            Series s(prec, 0);
            for (std::size_t i = 0; i < re.size(); ++i) {
                s.coeffs.emplace_back(Real::from_exact(prec.bits(), re[i].get<std::string>()),
                                      Real::from_exact(prec.bits(), im[i].get<std::string>()));
            }
            s.origin = spec.label;
            return s;
        } catch (const std::exception &) {
            return std::nullopt;
        }
    }

    void store(const std::string &k, const FunctionSpec &spec, const Series &s) const
    {
        if (!m_dir) {
            return;
        }
        std::filesystem::create_directories(*m_dir);
        nlohmann::json re = nlohmann::json::array();
        nlohmann::json im = nlohmann::json::array();
        for (const auto &c : s.coeffs) {
            re.push_back(c.re().to_exact());
            im.push_back(c.im().to_exact());
        }
        const nlohmann::json j{{"spec", spec}, {"digits", s.precision.digits()}, {"length", s.size()}, {"re", re}, {"im", im}};
        const auto tmp = *m_dir / (k + ".json.tmp");
        {
            std::ofstream out(tmp);
            out << j.dump();
        }
        std::filesystem::rename(tmp, *m_dir / (k + ".json"));
    }

    std::optional<std::filesystem::path> m_dir;
    std::mutex m_mutex;
    std::map<std::string, std::mutex> m_slots;
    std::map<std::string, Series> m_mem;
    std::size_t m_hits = 0;
    std::size_t m_misses = 0;
};

/// Serializes artifact creation and records content hashes.
class ArtifactWriter
{
public:
    explicit ArtifactWriter(std::filesystem::path root) : m_root(std::move(root)) {}

    std::string write(const std::filesystem::path &relative, const std::string &content)
    {
        std::lock_guard lock(m_mutex);
        const auto path = m_root / relative;
        std::filesystem::create_directories(path.parent_path());
        {
            std::ofstream out(path, std::ios::binary);
            out << content;
            if (!out) {
                throw std::runtime_error("cannot write " + path.string());
            }
        }
        const std::string hash = sha256_hex(content);
        m_entries[relative.generic_string()] = {hash, content.size()};
        return hash;
    }

    nlohmann::json manifest_entries() const
    {
        std::lock_guard lock(m_mutex);
        nlohmann::json out = nlohmann::json::array();
        for (const auto &[path, e] : m_entries) {
            out.push_back({{"path", path}, {"sha256", e.first}, {"bytes", e.second}});
        }
        return out;
    }

private:
    std::filesystem::path m_root;
    mutable std::mutex m_mutex;
    std::map<std::string, std::pair<std::string, std::size_t>> m_entries;
};

/// Everything computed for one degree.
struct DegreeOutcome
{
    int n = 0;
    bool ok = false;
    nlohmann::json entry;
    std::optional<HpSolution> solution;
    std::vector<RootCloud> clouds;
    std::vector<std::vector<Point>> points;
    std::optional<FroissartReport> report;
};

inline std::string family_tag(const RunConfig &c)
{
    std::string t;
    for (int f : c.plot.families) {
        t += std::to_string(f);
    }
    return t;
}

inline std::size_t series_length(SystemKind kind, int n)
{
    switch (kind) {
        case SystemKind::hermite_pade:
            return static_cast<std::size_t>(3 * n + 2);
        case SystemKind::pade:
            return static_cast<std::size_t>(2 * n + 1);
        case SystemKind::two_point:
            return static_cast<std::size_t>(n + 1);
    }
    return 0;
}

inline OrderSystem build_system(SystemKind kind, const std::vector<Series> &s, int n)
{
    switch (kind) {
        case SystemKind::hermite_pade:
            return build_hp_system(s[0], s[1], n);
        case SystemKind::pade:
            return build_pade_system(s[0], n);
        case SystemKind::two_point:
            return build_two_point_system(s[0], s[1], n);
    }
    throw std::logic_error("unknown system kind");
}

inline std::string clouds_csv(const std::vector<RootCloud> &clouds)
{
    std::string out = std::string(root_csv_header) + "\n";
    for (const auto &c : clouds) {
        out += to_csv_rows(c);
    }
    return out;
}

/// Runs one degree; every failure is caught and recorded in the entry.
/// `hint` is the longest series any degree of the run needs at this
/// precision, so a fixed-precision sweep builds each series once.
inline DegreeOutcome process_degree(const RunConfig &cfg, int n, SeriesCache &cache, ArtifactWriter &writer,
                                    std::size_t hint = 0)
{
    DegreeOutcome out;
    out.n = n;
    const long digits = cfg.digits_for(n);
    nlohmann::json e{{"n", n}, {"digits", digits}};
    const std::string stem = cfg.label + "_" + std::to_string(n);
    std::string stage = "series";
    try {
        const Precision prec(digits);
        const std::size_t len = series_length(cfg.mode, n);
        const std::size_t want = std::max(len, hint);
        std::vector<Series> series;
        for (const auto &s : cfg.specs) {
            series.push_back(cache.get(s, want, prec).head(len));
        }

        stage = "solve";
        HpSolution sol = kernel_solve(build_system(cfg.mode, series, n));
        e["kernel_defect"] = sol.kernel_defect;
        e["rank"] = sol.rank;
        e["residual_norm"] = sol.residual_norm.to_string(6);

        stage = "order_check";
        std::vector<Series> ref;
        for (const auto &s : cfg.specs) {
            ref.push_back(cache.get(s, want, prec.doubled()).head(len));
        }
        const auto rems = residual_series(sol, ref);
        double worst = -HUGE_VAL;
        for (const auto &r : rems) {
            for (std::size_t t = 0; t < r.required; ++t) {
                worst = std::max(worst, r.relative_log10(t));
            }
        }
        e["order_check"] = {{"passed", true},
                            {"max_log10_relative_remainder", std::isfinite(worst) ? nlohmann::json(std::round(worst * 100) / 100) : nlohmann::json(nullptr)}};
        e["solution"] = writer.write("solutions/" + stem + ".json", to_json(sol).dump(1) + "\n");

        stage = "roots";
        nlohmann::json fams = nlohmann::json::array();
        for (std::size_t f = 0; f < sol.polys.size(); ++f) {
            const auto &q = sol.polys[f];
            const bool vanishes = std::all_of(q.begin(), q.end(), [](const Complex &c) { return c.is_zero(); });
            RootCloud cloud;
            cloud.family = static_cast<int>(f);
            cloud.n = n;
            cloud.digits = digits;
            if (!vanishes) {
                cloud = certify(q, find_roots(q, prec, static_cast<int>(f), n));
            }
            const auto uncertified = std::count(cloud.certified.begin(), cloud.certified.end(), false);
            fams.push_back({{"family", f},
                            {"vanishes", vanishes},
                            {"effective_degree", cloud.effective_degree},
                            {"roots", cloud.size()},
                            {"converged", cloud.converged},
                            {"iterations", cloud.iterations},
                            {"uncertified", uncertified}});
            out.points.push_back(to_points(cloud));
            out.clouds.push_back(std::move(cloud));
        }
        e["families"] = fams;
        e["roots"] = writer.write("roots/" + stem + ".csv", clouds_csv(out.clouds));

        if (cfg.analysis) {
            stage = "analysis";
            FroissartReport rep = froissart_report(out.points, cfg.detector, n);
            nlohmann::json rj = to_json(rep);
            if (cfg.mode == SystemKind::hermite_pade && cfg.potential && n > 0) {
                try {
                    std::vector<FactoredPoly> fp;
                    for (std::size_t f = 1; f < 3; ++f) {
                        if (out.clouds[f].effective_degree > 0 || !out.clouds[f].points.empty()) {
                            fp.push_back(factored(sol.polys[f], out.clouds[f]));
                        }
                    }
                    if (!fp.empty()) {
                        e["potential"] = writer.write("potential/" + stem + ".csv", potential_grid(fp, n, *cfg.potential).to_csv());
                    }
                } catch (const ClearanceError &err) {
                    e["potential_error"] = err.what();
                }
            }
            e["report"] = writer.write("reports/" + stem + ".json", rj.dump(1) + "\n");
            e["structures"] = {{"doublets", rep.doublets.size()}, {"singlets", rep.singlets.size()}, {"triplets", rep.triplets.size()}};
            out.report = std::move(rep);
        }

        if (cfg.plots) {
            stage = "plot";
            std::vector<PlotCloud> pc;
            for (std::size_t f = 0; f < out.points.size(); ++f) {
                pc.push_back({static_cast<int>(f), out.points[f]});
            }
            PlotSpec spec = cfg.plot;
            spec.title = cfg.label + ", n = " + std::to_string(n);
            e["plot"] = writer.write("plots/" + plot_filename(cfg.label, n, cfg.plot.families), scatter(pc, spec));
        }
        out.solution = std::move(sol);
        out.ok = true;
        e["status"] = "ok";
    } catch (const InsufficientPrecisionError &err) {
        e["status"] = "failed";
        e["diagnosis"] = {{"stage", stage}, {"error", err.what()}, {"suggested_digits", err.suggested_digits}};
    } catch (const std::exception &err) {
        e["status"] = "failed";
        e["diagnosis"] = {{"stage", stage}, {"error", err.what()}};
    }
    out.entry = std::move(e);
    return out;
}

/// Thresholds applied by the numerical stages, echoed into every manifest.
inline nlohmann::json threshold_record(const RunConfig &c)
{
    return {{"rank_pivot", "10^(-digits/2) * row scale"},
            {"solve_residual", "10^(-digits/2)"},
            {"order_check", "10^(-digits/2) relative to sum |q||c|, series at 2*digits"},
            {"deflation", "10^(-digits/2) * max |a_k|"},
            {"aberth_stop", "10^(-digits/2) * Fujiwara radius, cap 500 * degree"},
            {"aberth_angle_offset", aberth_angle_offset},
            {"certification", "10^(-digits/4), residual at 2*digits"},
            {"detector", c.detector}};
}

inline nlohmann::json sweep_statistics(const RunConfig &cfg, const std::vector<DegreeOutcome> &outcomes)
{
    nlohmann::json fams = nlohmann::json::array();
    const std::size_t nf = family_count(cfg.mode);
    for (std::size_t f = 0; f < nf; ++f) {
        std::map<int, CountingMeasure> sweep;
        for (const auto &o : outcomes) {
            if (o.ok && f < o.points.size()) {
                sweep.emplace(o.n, CountingMeasure(o.points[f], o.n));
            }
        }
        const auto steps = consecutive_discrepancy(sweep);
        nlohmann::json sj = nlohmann::json::array();
        for (const auto &s : steps) {
            sj.push_back({{"from", s.n_prev}, {"to", s.n}, {"discrepancy", s.value}});
        }
        fams.push_back({{"family", f}, {"consecutive", sj}, {"trend_slope", trend_slope(steps)}});
    }
    std::map<int, FroissartReport> reports;
    for (const auto &o : outcomes) {
        if (o.ok && o.report) {
            reports.emplace(o.n, *o.report);
        }
    }
    return {{"label", cfg.label}, {"families", fams}, {"structure_stability", to_json(structure_stability(reports))}};
}

struct RunResult
{
    nlohmann::json manifest;
    std::size_t failed = 0;
    std::size_t succeeded = 0;
    std::vector<DegreeOutcome> outcomes;
};

/// Runs every degree of the config, `workers` at a time.
inline RunResult run(const RunConfig &cfg, std::ostream *log = nullptr)
{
    cfg.validate();
    std::filesystem::create_directories(cfg.output);
    SeriesCache cache(cfg.cache_path());
    ArtifactWriter writer(cfg.output);

    std::map<long, std::size_t> longest;
    for (int n : cfg.degrees) {
        auto &l = longest[cfg.digits_for(n)];
        l = std::max(l, series_length(cfg.mode, n));
    }
    std::vector<DegreeOutcome> outcomes(cfg.degrees.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.degrees.size(); i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            const int n = cfg.degrees[i];
            outcomes[i] = process_degree(cfg, n, cache, writer, longest.at(cfg.digits_for(n)));
            if (log) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                std::lock_guard lock(log_mutex);
                *log << cfg.label << " n=" << cfg.degrees[i] << ' ' << outcomes[i].entry.value("status", "?") << " ("
                     << std::fixed << std::setprecision(1) << secs << "s)";
                if (outcomes[i].entry.contains("diagnosis")) {
                    *log << ": " << outcomes[i].entry["diagnosis"].value("error", "");
                }
                *log << std::endl;
            }
        }
    };
    const unsigned nthreads = std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.degrees.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }

    RunResult result;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &o : outcomes) {
        entries.push_back(o.entry);
        (o.ok ? result.succeeded : result.failed)++;
    }
    if (cfg.analysis && cfg.degrees.size() > 1) {
        writer.write("sweep.json", sweep_statistics(cfg, outcomes).dump(1) + "\n");
    }
    nlohmann::json m{{"tool", "hplab"},
                     {"version", tool_version},
                     {"config", to_json(cfg)},
                     {"thresholds", threshold_record(cfg)},
                     {"degrees", entries},
                     {"artifacts", writer.manifest_entries()},
                     {"status", result.failed == 0 ? "ok" : (result.succeeded == 0 ? "failed" : "partial")}};
    {
        std::ofstream out(cfg.output / "manifest.json", std::ios::binary);
        out << m.dump(1) << "\n";
    }
    if (log) {
        *log << "series cache: " << cache.hits() << " hits, " << cache.misses() << " misses" << std::endl;
    }
    result.manifest = std::move(m);
    result.outcomes = std::move(outcomes);
    return result;
}

/// Clouds read back from a roots CSV: n -> family -> points.
using StoredClouds = std::map<int, std::map<int, std::vector<Point>>>;

inline StoredClouds read_root_csv(std::istream &in)
{
    StoredClouds out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("family", 0) == 0) {
            continue;
        }
        std::stringstream row(line);
        std::string f, n, re, im;
        if (!std::getline(row, f, ',') || !std::getline(row, n, ',') || !std::getline(row, re, ',')
            || !std::getline(row, im, ',')) {
            throw std::invalid_argument("roots csv line " + std::to_string(lineno) + ": expected family,n,re,im,...");
        }
        // strtod, not stod: values far below the double range read as 0
        auto number = [&](const std::string &s) {
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0') {
                throw std::invalid_argument("roots csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
            }
            return v;
        };
        const Point z(number(re), number(im));
        int ni = 0, fi = 0;
        try {
            ni = std::stoi(n);
            fi = std::stoi(f);
        } catch (const std::logic_error &) {
            throw std::invalid_argument("roots csv line " + std::to_string(lineno) + ": bad index");
        }
        out[ni][fi].push_back(z);
    }
    return out;
}

inline StoredClouds read_root_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read " + path.string());
    }
    return read_root_csv(in);
}

} // namespace hplab

#endif
