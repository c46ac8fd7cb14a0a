#include <hplab/pipeline.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_partial = 2;

struct RunOptions
{
    std::string config;
    std::optional<long> digits;
    std::string degrees;
    std::string out;
    std::optional<unsigned> workers;
    bool no_plots = false;
};

int cmd_run(const RunOptions &o)
{
    nlohmann::json j;
    {
        std::ifstream in(o.config);
        if (!in) {
            std::cerr << "error: cannot read config '" << o.config << "'\n";
            return exit_invalid;
        }
        try {
            in >> j;
        } catch (const nlohmann::json::exception &e) {
            std::cerr << "error: " << o.config << ": " << e.what() << '\n';
            return exit_invalid;
        }
    }
    if (o.digits) {
        j["digits"] = *o.digits;
    }
    if (!o.degrees.empty()) {
        j["degrees"] = o.degrees;
    }
    if (!o.out.empty()) {
        j["output"] = o.out;
    }
    if (o.workers) {
        j["workers"] = *o.workers;
    }
    if (o.no_plots) {
        j["plots"]["enabled"] = false;
    }
    hplab::RunConfig cfg;
    try {
        cfg = hplab::config_from_json(j);
    } catch (const hplab::ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    const auto result = hplab::run(cfg, &std::cerr);
    std::cerr << result.succeeded << " of " << cfg.degrees.size() << " degrees done; manifest "
              << (cfg.output / "manifest.json").string() << '\n';
    if (result.failed == 0) {
        return exit_ok;
    }
    return exit_partial;
}

int cmd_presets(bool as_json)
{
    if (as_json) {
        std::cout << hplab::presets_json().dump(1) << '\n';
        return exit_ok;
    }
    for (const auto &p : hplab::presets()) {
        std::cout << p.name << "  [" << hplab::to_string(p.mode) << "]  " << p.formula << '\n';
    }
    return exit_ok;
}

struct PlotOptions
{
    std::string csv;
    std::string label = "plot";
    std::string out = ".";
    std::vector<double> viewport;
    std::string preset;
};

int cmd_plot(const PlotOptions &o)
{
    hplab::StoredClouds stored;
    hplab::PlotSpec spec;
    try {
        stored = hplab::read_root_csv(std::filesystem::path(o.csv));
        if (!o.preset.empty()) {
            const auto p = hplab::find_preset(o.preset);
            spec.re_min = p.re_min;
            spec.re_max = p.re_max;
            spec.im_min = p.im_min;
            spec.im_max = p.im_max;
            spec.annotations = p.marks;
        }
        if (!o.viewport.empty()) {
            if (o.viewport.size() != 4) {
                throw std::invalid_argument("--viewport needs four numbers");
            }
            spec.re_min = o.viewport[0];
            spec.re_max = o.viewport[1];
            spec.im_min = o.viewport[2];
            spec.im_max = o.viewport[3];
        }
        spec.allow_empty = true;
        spec.validate();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    std::filesystem::create_directories(o.out);
    for (const auto &[n, fams] : stored) {
        std::vector<hplab::PlotCloud> clouds;
        spec.families.clear();
        for (const auto &[f, pts] : fams) {
            clouds.push_back({f, pts});
            spec.families.push_back(f);
        }
        spec.title = o.label + ", n = " + std::to_string(n);
        const auto path = std::filesystem::path(o.out) / hplab::plot_filename(o.label, n, spec.families);
        std::ofstream(path, std::ios::binary) << hplab::scatter(clouds, spec);
        std::cout << path.string() << '\n';
    }
    return exit_ok;
}

int cmd_detect(const std::string &csv, const std::string &thresholds)
{
    hplab::StoredClouds stored;
    hplab::DetectorThresholds t;
    try {
        stored = hplab::read_root_csv(std::filesystem::path(csv));
        if (!thresholds.empty()) {
            std::ifstream in(thresholds);
            if (!in) {
                throw std::invalid_argument("cannot read " + thresholds);
            }
            t = nlohmann::json::parse(in).get<hplab::DetectorThresholds>();
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    nlohmann::json out = nlohmann::json::array();
    bool failed = false;
    for (const auto &[n, fams] : stored) {
        const int nf = fams.rbegin()->first + 1;
        std::vector<std::vector<hplab::Point>> clouds(static_cast<std::size_t>(std::max(nf, 2)));
        for (const auto &[f, pts] : fams) {
            clouds[static_cast<std::size_t>(f)] = pts;
        }
        try {
            out.push_back(hplab::to_json(hplab::froissart_report(clouds, t, n)));
        } catch (const std::exception &e) {
            out.push_back({{"n", n}, {"error", e.what()}});
            failed = true;
        }
    }
    std::cout << out.dump(1) << '\n';
    return failed ? exit_partial : exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"High-precision lab for Padé, two-point Padé and Hermite-Padé polynomials"};
    app.require_subcommand(1);

    RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "Run a JSON config (preset or explicit specs) over its degrees");
    run_cmd->add_option("config", run.config, "config file")->required();
    run_cmd->add_option("--digits", run.digits, "working precision in decimal digits for every n");
    run_cmd->add_option("--degrees", run.degrees, "degrees, e.g. 40 or 25..40 or 10,20,40");
    run_cmd->add_option("--out", run.out, "output directory");
    run_cmd->add_option("--workers", run.workers, "degrees computed concurrently");
    run_cmd->add_flag("--no-plots", run.no_plots, "skip SVG output");

    bool presets_as_json = false;
    auto *presets_cmd = app.add_subcommand("presets", "List the built-in function configurations");
    presets_cmd->add_flag("--json", presets_as_json, "full catalog as JSON");

    PlotOptions plot;
    auto *plot_cmd = app.add_subcommand("plot", "Re-plot root clouds from a stored roots CSV");
    plot_cmd->add_option("csv", plot.csv, "roots CSV (family,n,re,im,residual)")->required();
    plot_cmd->add_option("--label", plot.label, "file-name label");
    plot_cmd->add_option("--out", plot.out, "output directory");
    plot_cmd->add_option("--viewport", plot.viewport, "re_min re_max im_min im_max")->expected(4);
    plot_cmd->add_option("--preset", plot.preset, "take viewport and marks from a preset");

    std::string detect_csv;
    std::string detect_thresholds;
    auto *detect_cmd = app.add_subcommand("detect", "Re-run the spurious-structure detectors on a stored roots CSV");
    detect_cmd->add_option("csv", detect_csv, "roots CSV")->required();
    detect_cmd->add_option("--thresholds", detect_thresholds, "JSON detector thresholds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_invalid;
    }

    if (*run_cmd) {
        return cmd_run(run);
    }
    if (*presets_cmd) {
        return cmd_presets(presets_as_json);
    }
    if (*plot_cmd) {
        return cmd_plot(plot);
    }
    return cmd_detect(detect_csv, detect_thresholds);
}
