// Command-line front end: synthesize oracle signals, decompose, demodulate,
// run the integrated pipeline and write spectrum files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <hsa/all.hpp>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct InputOptions {
    std::string path;
    std::optional<double> rate;

    void add(CLI::App* app) {
        app->add_option("input", path, "Signal file (.csv or .wav)")->required();
        app->add_option("--rate", rate, "Sample rate in Hz for one-column CSV");
    }
    [[nodiscard]] hsa::SampledSignal load() const { return hsa::read_signal(path, hsa::SignalFormat::automatic, rate); }
};

struct DecomposeOptions {
    double alpha = 0.95;
    double resolution_db = 50.0;
    std::size_t max_iterations = 50;
    std::size_t max_components = 16;
    double energy_threshold = 1e-10;
    std::size_t trials = 1;
    std::vector<double> beta{0.0};
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;

    void add(CLI::App* app, bool noisy, std::size_t default_trials, double default_beta) {
        trials = default_trials;
        beta = {default_beta};
        app->add_option("--alpha", alpha, "Sifting step size")->capture_default_str();
        app->add_option("--resolution-db", resolution_db, "Sifting stop resolution in dB")->capture_default_str();
        app->add_option("--max-iterations", max_iterations, "Sifting iteration cap")->capture_default_str();
        app->add_option("--max-components", max_components, "Component cap")->capture_default_str();
        app->add_option("--energy-threshold", energy_threshold, "Residual energy stop, relative to the input")
            ->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
        if (noisy) {
            app->add_option("-I,--trials", trials, "Ensemble size")->capture_default_str();
            app->add_option("--beta", beta, "SNR factor per level (last value repeats)")->delimiter(',')
                ->capture_default_str();
            app->add_option("--seed", seed, "Noise seed")->required();
        }
    }

    [[nodiscard]] hsa::DecomposeConfig config() const {
        hsa::DecomposeConfig c;
        c.sift.alpha = alpha;
        c.sift.resolution_db = resolution_db;
        c.sift.max_iterations = max_iterations;
        c.max_components = max_components;
        c.energy_threshold = energy_threshold;
        c.trials = trials;
        c.snr_factors = beta;
        c.noise_seed = seed.value_or(0);
        c.threads = threads;
        return c;
    }

    // Thread count is left out on purpose: it never changes the output.
    [[nodiscard]] json echo() const {
        json j{{"alpha", alpha},
               {"resolution_db", resolution_db},
               {"max_iterations", max_iterations},
               {"max_components", max_components},
               {"energy_threshold", energy_threshold},
               {"trials", trials},
               {"beta", beta}};
        if (seed) j["seed"] = *seed;
        return j;
    }
};

void write_decomposition_csv(const std::string& path, const hsa::Decomposition& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hsa::ParseError("cannot write " + path);
    out << 't';
    for (std::size_t k = 0; k < d.imfs.size(); ++k) out << ",imf_" << k + 1;
    out << ",residual\n";
    for (std::size_t i = 0; i < d.residual.size(); ++i) {
        out << hsa::format_double(d.residual.time(static_cast<double>(i)));
        for (const auto& imf : d.imfs) out << ',' << hsa::format_double(imf[i]);
        out << ',' << hsa::format_double(d.residual[i]) << '\n';
    }
}

void write_spectrum_or_stdout(const std::string& path, const hsa::SpectrumFile& f) {
    if (path.empty() || path == "-") std::cout << hsa::serialize_spectrum(f);
    else hsa::write_spectrum(path, f);
}

void print_summary(const hsa::HilbertSpectrum& h) {
    std::fprintf(stderr, "%zu component(s), %zu samples at %g Hz\n", h.components.size(), h.residual.size(),
                 h.residual.sample_rate());
    for (std::size_t k = 0; k < h.components.size(); ++k) {
        const auto& c = h.components[k];
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < c.ia.size(); ++i) {
            num += c.ia[i] * c.ia[i] * c.if_[i];
            den += c.ia[i] * c.ia[i];
        }
        std::fprintf(stderr, "  [%zu] rms a = %.6g, weighted IF = %.6g Hz, flagged = %zu\n", k,
                     std::sqrt(den / static_cast<double>(c.ia.size())), den > 0.0 ? num / den / hsa::kTwoPi : 0.0,
                     c.flagged.size());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hilbert spectral analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hsa::kToolVersion));

    // synth ------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate an oracle signal or its closed-form spectrum");
    std::string synth_kind;
    double rate = 8000.0, duration = 1.0, amplitude = 1.0, freq_hz = 100.0;
    double omega0 = 50.0 * hsa::kPi;
    hsa::SinFMParams sinfm;
    double f1 = 100.0, f2 = 1000.0;
    std::string synth_out, synth_spectrum;
    std::size_t harmonics = 3, k_max = 10000;
    int bessel_kmin = -60, bessel_kmax = 60;
    std::string units;
    synth->add_option("kind", synth_kind, "tone | triangle | sinfm | example1 | example2 | two-tone")
        ->required()
        ->check(CLI::IsMember({"tone", "triangle", "sinfm", "example1", "example2", "two-tone"}));
    synth->add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();
    synth->add_option("--duration", duration, "Seconds")->capture_default_str();
    synth->add_option("--amplitude", amplitude, "Tone or triangle amplitude")->capture_default_str();
    synth->add_option("--freq", freq_hz, "Tone frequency in Hz")->capture_default_str();
    synth->add_option("--omega0", omega0, "Triangle fundamental in rad/s")->capture_default_str();
    synth->add_option("--omega-c", sinfm.omega_c, "FM carrier in rad/s")->capture_default_str();
    synth->add_option("--omega-m", sinfm.omega_m, "FM modulation rate in rad/s")->capture_default_str();
    synth->add_option("-B,--index", sinfm.B, "FM index")->capture_default_str();
    synth->add_option("--f1", f1, "Two-tone lower frequency in Hz")->capture_default_str();
    synth->add_option("--f2", f2, "Two-tone upper frequency in Hz")->capture_default_str();
    synth->add_option("--units", units, "Example FM message units (hz | rad)")->check(CLI::IsMember({"hz", "rad"}));
    synth->add_option("--spectrum", synth_spectrum, "Write a closed-form spectrum instead of samples")
        ->check(CLI::IsMember({"shc", "fm", "am", "hc", "bessel"}));
    synth->add_option("--harmonics", harmonics, "Triangle SHC harmonics")->capture_default_str();
    synth->add_option("--kmax", k_max, "Triangle HC series terms")->capture_default_str();
    synth->add_option("--bessel-kmin", bessel_kmin, "Lowest Bessel sideband")->capture_default_str();
    synth->add_option("--bessel-kmax", bessel_kmax, "Highest Bessel sideband")->capture_default_str();
    synth->add_option("-o,--output", synth_out, "Output path (CSV, or spectrum JSON with --spectrum)")->required();

    // emd / eemd / ceemd -------------------------------------------------------
    struct DecomposeCommand {
        CLI::App* app;
        InputOptions input;
        DecomposeOptions opts;
        std::string output;
        bool demod = false;
        double smooth = 0.0;
    };
    std::vector<DecomposeCommand> decomposers(3);
    const char* names[] = {"emd", "eemd", "ceemd"};
    const char* help[] = {"Empirical mode decomposition", "Ensemble EMD", "Complete ensemble EMD"};
    for (int i = 0; i < 3; ++i) {
        auto& d = decomposers[static_cast<std::size_t>(i)];
        d.app = app.add_subcommand(names[i], help[i]);
        d.input.add(d.app);
        d.opts.add(d.app, i > 0, i > 0 ? 50 : 1, i > 0 ? 0.2 : 0.0);
        d.app->add_option("-o,--output", d.output, "CSV of IMFs, or spectrum JSON with --demod")->required();
        d.app->add_flag("--demod", d.demod, "Demodulate each IMF and write a spectrum file");
        d.app->add_option("--smooth", d.smooth, "IF moving-average window in seconds")->capture_default_str();
    }

    // demod --------------------------------------------------------------------
    auto* demod = app.add_subcommand("demod", "Demodulate a single mono-component signal");
    InputOptions demod_in;
    demod_in.add(demod);
    std::string demod_method = "imf", demod_out;
    double demod_smooth = 0.0;
    demod->add_option("--method", demod_method, "imf | gabor | teo")
        ->check(CLI::IsMember({"imf", "gabor", "teo"}))
        ->capture_default_str();
    demod->add_option("--smooth", demod_smooth, "IF moving-average window in seconds (imf only)")->capture_default_str();
    demod->add_option("-o,--output", demod_out, "Spectrum JSON")->required();

    // hsa ----------------------------------------------------------------------
    auto* hsa_cmd = app.add_subcommand("hsa", "Integrated masked decomposition and demodulation");
    InputOptions hsa_in;
    hsa_in.add(hsa_cmd);
    DecomposeOptions hsa_opts;
    hsa_opts.add(hsa_cmd, true, 200, 4.0);
    double hsa_smooth = 1e-3, cutoff_fraction = 0.9, first_cutoff_fraction = 0.9;
    std::string mask = "filtered", hsa_out;
    hsa_cmd->add_option("--smooth", hsa_smooth, "IF moving-average window in seconds")->capture_default_str();
    hsa_cmd->add_option("--mask", mask, "filtered | sifted")
        ->check(CLI::IsMember({"filtered", "sifted"}))
        ->capture_default_str();
    hsa_cmd->add_option("--cutoff-fraction", cutoff_fraction, "Mask cutoff relative to the previous component's IF")
        ->capture_default_str();
    hsa_cmd->add_option("--first-cutoff-fraction", first_cutoff_fraction, "Level-0 mask cutoff relative to Nyquist")
        ->capture_default_str();
    hsa_cmd->add_option("-o,--output", hsa_out, "Spectrum JSON")->required();

    // stft ---------------------------------------------------------------------
    auto* stft_cmd = app.add_subcommand("stft", "Short-time Fourier magnitude");
    InputOptions stft_in;
    stft_in.add(stft_cmd);
    hsa::STFTParams stft_params;
    std::string stft_out;
    stft_cmd->add_option("--window", stft_params.window_length, "Hamming window length")->capture_default_str();
    stft_cmd->add_option("--hop", stft_params.hop, "Frame advance in samples")->capture_default_str();
    stft_cmd->add_option("-o,--output", stft_out, "JSON output")->required();

    // info ---------------------------------------------------------------------
    auto* info = app.add_subcommand("info", "Summarize a signal or spectrum file");
    InputOptions info_in;
    info_in.add(info);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            const auto grid = hsa::TimeGrid::seconds(rate, duration);
            if (grid.length < 2) throw hsa::ContractError("synth: duration too short");
            const json echo{{"kind", synth_kind}, {"rate", rate}, {"duration", duration}};
            if (synth_kind == "tone") {
                if (!synth_spectrum.empty()) {
                    hsa::HilbertSpectrum h{{hsa::make_component(std::vector<double>(grid.length, amplitude),
                                                                std::vector<double>(grid.length, hsa::kTwoPi * freq_hz),
                                                                0.0, rate)},
                                           hsa::SampledSignal::zeros(grid.length, rate)};
                    hsa::write_spectrum(synth_out, hsa::to_spectrum_file(h, echo));
                } else {
                    hsa::write_csv(synth_out, hsa::sample(grid, [&](double t) {
                                       return amplitude * std::cos(hsa::kTwoPi * freq_hz * t);
                                   }));
                }
            } else if (synth_kind == "triangle") {
                const hsa::TriangleParams p{amplitude, omega0};
                p.validate();
                const auto zeros = hsa::SampledSignal::zeros(grid.length, rate);
                if (synth_spectrum.empty()) {
                    hsa::write_csv(synth_out, hsa::gen_triangle(p, grid));
                } else {
                    hsa::HilbertSpectrum h{{}, zeros};
                    if (synth_spectrum == "shc") h = hsa::triangle_shc_spectrum(p, grid, harmonics);
                    else if (synth_spectrum == "fm") h.components.push_back(hsa::triangle_fm_solution(p, grid));
                    else if (synth_spectrum == "am") h.components.push_back(hsa::triangle_am_solution(p, grid));
                    else if (synth_spectrum == "hc") h.components.push_back(hsa::triangle_hc_solution(p, grid, k_max));
                    else throw hsa::ContractError("synth triangle: unsupported spectrum kind " + synth_spectrum);
                    hsa::write_spectrum(synth_out, hsa::to_spectrum_file(h, echo));
                }
            } else if (synth_kind == "sinfm") {
                sinfm.validate();
                if (synth_spectrum.empty()) {
                    hsa::write_csv(synth_out, hsa::gen_sin_fm(sinfm, grid));
                } else {
                    hsa::HilbertSpectrum h{{}, hsa::SampledSignal::zeros(grid.length, rate)};
                    if (synth_spectrum == "fm") h.components.push_back(hsa::sin_fm_solution(sinfm, grid));
                    else if (synth_spectrum == "bessel" || synth_spectrum == "shc")
                        h = hsa::sin_fm_shc_spectrum(sinfm, grid, bessel_kmin, bessel_kmax);
                    else throw hsa::ContractError("synth sinfm: unsupported spectrum kind " + synth_spectrum);
                    hsa::write_spectrum(synth_out, hsa::to_spectrum_file(h, echo));
                }
            } else if (synth_kind == "example1" || synth_kind == "example2") {
                const auto id = synth_kind == "example1" ? hsa::ExampleId::slow_am_fast_fm : hsa::ExampleId::fast_am_slow_fm;
                auto spec = hsa::FMMessageSpec::defaults(id);
                if (!units.empty()) spec.units = units == "hz" ? hsa::UnitsMode::hz : hsa::UnitsMode::rad_per_s;
                const auto ex = hsa::gen_example_signal(spec, grid);
                if (synth_spectrum.empty()) {
                    hsa::write_csv(synth_out, ex.signal);
                } else {
                    if (synth_spectrum != "fm") throw hsa::ContractError("synth example: only the fm spectrum exists");
                    auto c = hsa::make_component(ex.ia, ex.if_, spec.phase(grid.t0), rate);
                    c.s = ex.signal.values();
                    hsa::HilbertSpectrum h{{std::move(c)}, hsa::SampledSignal::zeros(grid.length, rate)};
                    hsa::write_spectrum(synth_out, hsa::to_spectrum_file(h, echo));
                }
            } else {
                if (!synth_spectrum.empty()) throw hsa::ContractError("synth two-tone: no closed-form spectrum");
                hsa::write_csv(synth_out, hsa::gen_two_tone(hsa::kTwoPi * f1, hsa::kTwoPi * f2, grid));
            }
            return kExitOk;
        }

        for (std::size_t i = 0; i < decomposers.size(); ++i) {
            auto& d = decomposers[i];
            if (!d.app->parsed()) continue;
            const auto x = d.input.load();
            const auto cfg = d.opts.config();
            const hsa::Decomposition dec = i == 0 ? hsa::emd(x, cfg) : i == 1 ? hsa::eemd(x, cfg) : hsa::ceemd(x, cfg);
            if (d.demod) {
                json echo = d.opts.echo();
                echo["command"] = names[i];
                echo["smooth"] = d.smooth;
                const auto h = hsa::demodulate(dec, d.smooth);
                print_summary(h);
                write_spectrum_or_stdout(d.output, hsa::to_spectrum_file(h, echo));
            } else {
                write_decomposition_csv(d.output, dec);
                std::fprintf(stderr, "%zu IMF(s)\n", dec.imfs.size());
            }
            return kExitOk;
        }

        if (demod->parsed()) {
            const auto x = demod_in.load();
            hsa::AMFMComponent c = demod_method == "imf"     ? hsa::imf_demod(x, demod_smooth)
                                   : demod_method == "gabor" ? hsa::gabor_as_demod(x)
                                                             : hsa::teo_demod(x);
            hsa::HilbertSpectrum h{{std::move(c)}, hsa::SampledSignal::zeros(x.size(), x.sample_rate(), x.t0())};
            print_summary(h);
            write_spectrum_or_stdout(demod_out,
                                     hsa::to_spectrum_file(h, json{{"command", "demod"},
                                                                   {"method", demod_method},
                                                                   {"smooth", demod_smooth}}));
            return kExitOk;
        }

        if (hsa_cmd->parsed()) {
            const auto x = hsa_in.load();
            hsa::HSAConfig cfg;
            cfg.decompose = hsa_opts.config();
            cfg.smoothing_seconds = hsa_smooth;
            cfg.mask_kind = mask == "filtered" ? hsa::MaskKind::filtered_noise : hsa::MaskKind::sifted_noise;
            cfg.cutoff_fraction = cutoff_fraction;
            cfg.first_cutoff_fraction = first_cutoff_fraction;
            const auto result = hsa::hsa_imf_detailed(x, cfg);
            json echo = hsa_opts.echo();
            echo["command"] = "hsa";
            echo["smooth"] = hsa_smooth;
            echo["mask"] = mask;
            echo["cutoff_fraction"] = cutoff_fraction;
            echo["first_cutoff_fraction"] = first_cutoff_fraction;
            print_summary(result.spectrum);
            write_spectrum_or_stdout(hsa_out, hsa::to_spectrum_file(result.spectrum, echo));
            return kExitOk;
        }

        if (stft_cmd->parsed()) {
            const auto x = stft_in.load();
            const auto g = hsa::stft_magnitude(x, stft_params);
            const json out{{"window_length", stft_params.window_length},
                           {"hop", stft_params.hop},
                           {"window", "hamming"},
                           {"times", g.times},
                           {"frequencies_hz", g.frequencies_hz},
                           {"magnitude", g.magnitude}};
            std::ofstream f(stft_out, std::ios::binary);
            if (!f) throw hsa::ParseError("cannot write " + stft_out);
            f << out.dump() << '\n';
            return kExitOk;
        }

        if (info->parsed()) {
            const std::string& p = info_in.path;
            if (p.size() >= 5 && p.substr(p.size() - 5) == ".json") {
                const auto f = hsa::read_spectrum(p);
                std::printf("spectrum schema %d, tool %s\n", f.schema_version, f.tool_version.c_str());
                print_summary(hsa::to_hilbert_spectrum(f));
                std::printf("config: %s\n", f.config.dump().c_str());
            } else {
                const auto x = info_in.load();
                std::printf("samples: %zu\nsample_rate: %.17g\nt0: %.17g\nduration: %.17g\nrms: %.17g\nmax_abs: %.17g\n",
                            x.size(), x.sample_rate(), x.t0(), static_cast<double>(x.size()) / x.sample_rate(),
                            std::sqrt(hsa::energy(x.samples())), hsa::max_abs(x.samples()));
                const auto check = hsa::is_imf(x);
                std::printf("extrema: %zu\nzero_crossings: %zu\n", check.extrema, check.zero_crossings);
            }
            return kExitOk;
        }
    } catch (const hsa::ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const hsa::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const hsa::Error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
