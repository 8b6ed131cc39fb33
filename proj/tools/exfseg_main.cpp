// Command-line driver: phantom generation, segmentation, benchmark sweeps,
// and mask evaluation. Exit codes: 0 success, 1 input error,
// 2 non-convergence, 3 region collapse.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "exfseg/eval.hpp"
#include "exfseg/io.hpp"
#include "exfseg/levelset.hpp"
#include "exfseg/synth.hpp"

namespace fs = std::filesystem;
using namespace exfseg;

namespace {

struct EvolveFlags {
    double lambda = 0.2;
    double dt = 0.5;
    double epsilon = 1.5;
    int max_iter = 2000;
    int reinit_every = 20;
    int converge_tol = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "Length regularization weight");
        cmd->add_option("--dt", dt, "Time step before the CFL clamp");
        cmd->add_option("--epsilon", epsilon, "Dirac/Heaviside width in pixels");
        cmd->add_option("--max-iter", max_iter, "Maximum number of iterations");
        cmd->add_option("--reinit-every", reinit_every,
                        "Reinitialize the level set every N steps");
        cmd->add_option("--converge-tol", converge_tol,
                        "Sign-change count treated as converged");
    }
    EvolveConfig to_config(const SpeedLaw& law) const {
        EvolveConfig c;
        c.lambda = lambda;
        c.dt = dt;
        c.epsilon = epsilon;
        c.max_iter = max_iter;
        c.reinit_every = reinit_every;
        c.converge_tol = converge_tol;
        c.law = law;
        return c;
    }
};

SpeedLaw law_from_flags(const std::string& model, const std::string& estimator) {
    if (model == "chanvese") return SpeedLaw::chan_vese();
    Family family = family_from_name(model);
    if (estimator == "moments") {
        if (family != Family::Rayleigh)
            throw CLI::ValidationError("--estimator moments requires --model rayleigh");
        return SpeedLaw::moments_rayleigh();
    }
    return SpeedLaw::ml(family);
}

// Applies a flat key=value config file to a subcommand: values fill options
// the user did not pass, so command-line flags always win.
void apply_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: malformed line '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw std::runtime_error("config: unknown key '" + key + "'");
        if (opt->count() > 0) continue; // flag overrides the file
        opt->add_result(value);
        opt->run_callback();
    }
}

std::string realization_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "real_%03d", index);
    return buf;
}

void write_energy_csv(const std::string& path, const std::vector<EnergyReport>& trace) {
    std::ofstream out(path);
    out << "iteration,region_inner,region_outer,boundary,lambda,total\n";
    char buf[256];
    for (size_t i = 0; i < trace.size(); ++i) {
        const EnergyReport& r = trace[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", i,
                      r.region_terms[0], r.region_terms[1], r.boundary_term, r.lambda,
                      r.total);
        out << buf;
    }
}

int cmd_generate(const BenchmarkSpec& spec_in, const std::string& out_dir) {
    BenchmarkSpec spec = spec_in;
    if (spec.shapes.empty())
        spec.shapes = default_phantom_shapes(spec.width, spec.height);
    fs::create_directories(out_dir);

    BoolGrid gt = make_phantom(spec);
    NoiseParams fg = calibrate(spec.noise, spec.bg, spec.target_D);
    const ExpFamilyModel& model = model_for(spec.noise);
    double achieved = bhattacharyya(model, natural_from_params(spec.noise, fg),
                                    natural_from_params(spec.noise, spec.bg));

    write_mask_pgm(out_dir + "/gt.pgm", gt);

    // Noise-free image: each region at its distribution mean.
    ScalarField clean(spec.width, spec.height);
    double mean_fg = model.mean_param(natural_from_params(spec.noise, fg))[0];
    double mean_bg = model.mean_param(natural_from_params(spec.noise, spec.bg))[0];
    if (spec.noise == Family::Gaussian) {
        mean_fg = fg.p1;
        mean_bg = spec.bg.p1;
    } else if (spec.noise == Family::Rayleigh) {
        mean_fg = fg.p1 * std::sqrt(3.14159265358979323846 / 2.0);
        mean_bg = spec.bg.p1 * std::sqrt(3.14159265358979323846 / 2.0);
    }
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            clean.at(x, y) = gt.at(x, y) ? mean_fg : mean_bg;
    write_pgm16(out_dir + "/phantom.pgm", clean);

    for (int r = 0; r < spec.realizations; ++r) {
        uint64_t seed = child_seed(spec.base_seed, static_cast<uint64_t>(r));
        ScalarField field = corrupt(gt, spec.noise, fg, spec.bg, seed);
        std::string stem = out_dir + "/" + realization_name(r);
        write_text_grid(stem + ".txt", field);
        write_pgm16(stem + "_view.pgm", field);
    }

    std::ofstream manifest(out_dir + "/manifest.txt");
    char buf[256];
    manifest << "noise=" << family_name(spec.noise) << "\n";
    std::snprintf(buf, sizeof(buf), "bg_param=%.17g\n", spec.bg.p1);
    manifest << buf;
    if (spec.noise == Family::Gaussian) {
        std::snprintf(buf, sizeof(buf), "sigma=%.17g\n", spec.bg.p2);
        manifest << buf;
    }
    std::snprintf(buf, sizeof(buf), "fg_param=%.17g\n", fg.p1);
    manifest << buf;
    std::snprintf(buf, sizeof(buf), "target_D=%.17g\nachieved_D=%.17g\n",
                  spec.target_D, achieved);
    manifest << buf;
    manifest << "width=" << spec.width << "\nheight=" << spec.height << "\n";
    manifest << "realizations=" << spec.realizations << "\n";
    manifest << "base_seed=" << spec.base_seed << "\n";
    if (!manifest) {
        std::cerr << "error: cannot write manifest\n";
        return 1;
    }
    return 0;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Render FPF-vs-D and TPF-vs-D curves, one curve per functional."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "aggregate.csv"))))
noises = sorted({r["noise"] for r in rows})
functionals = sorted({r["functional"] for r in rows})

fig, axes = plt.subplots(len(noises), 2, figsize=(10, 4 * len(noises)),
                         squeeze=False)
for i, noise in enumerate(noises):
    for j, metric in enumerate(["mean_fpf", "mean_tpf"]):
        ax = axes[i][j]
        for fn in functionals:
            pts = sorted((float(r["D"]), float(r[metric])) for r in rows
                         if r["noise"] == noise and r["functional"] == fn)
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=fn)
        ax.set_xlabel("Bhattacharyya distance")
        ax.set_ylabel(metric.replace("mean_", "").upper())
        ax.set_title(f"{noise} noise")
        ax.legend()
fig.tight_layout()
out = os.path.join(here, "fpf_tpf.png")
fig.savefig(out, dpi=150)
print(out)
)PY";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-region statistical active-contour segmentation benchmark"};
    app.require_subcommand(1);

    // ---- generate -----------------------------------------------------
    auto* gen = app.add_subcommand("generate",
                                   "Write a phantom, ground truth, and noisy realizations");
    std::string gen_out = "out";
    std::string gen_noise = "poisson";
    double gen_bg = -1.0, gen_sigma = 1.0, gen_target_d = 0.5;
    int gen_width = 128, gen_height = 128, gen_realizations = 10;
    uint64_t gen_seed = 1;
    std::string gen_config;
    gen->add_option("--config", gen_config, "Flat key=value config file");
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--seed", gen_seed, "Base seed");
    gen->add_option("--noise", gen_noise, "Noise family: gauss|poisson|rayleigh");
    gen->add_option("--bg", gen_bg, "Background parameter (family default if unset)");
    gen->add_option("--sigma", gen_sigma, "Shared sigma (Gaussian noise only)");
    gen->add_option("--target-d", gen_target_d, "Target Bhattacharyya distance");
    gen->add_option("--width", gen_width, "Image width");
    gen->add_option("--height", gen_height, "Image height");
    gen->add_option("--realizations", gen_realizations, "Number of noisy realizations");

    // ---- segment ------------------------------------------------------
    auto* seg = app.add_subcommand("segment", "Segment one image");
    std::string seg_image, seg_out = "out", seg_model = "poisson", seg_estimator = "ml";
    std::string seg_init;
    uint64_t seg_seed = 1;
    EvolveFlags seg_flags;
    std::string seg_config;
    seg->add_option("--config", seg_config, "Flat key=value config file");
    seg->add_option("image", seg_image, "Input image (P5/P2 graymap or text grid)")
        ->required();
    seg->add_option("--out", seg_out, "Output directory");
    seg->add_option("--seed", seg_seed, "Seed (reserved; segmentation is deterministic)");
    seg->add_option("--model", seg_model,
                    "Noise model: gauss|poisson|rayleigh|chanvese");
    seg->add_option("--estimator", seg_estimator, "Estimator: ml|moments");
    seg->add_option("--init", seg_init, "Initial mask image (default: circle grid)");
    seg_flags.attach(seg);

    // ---- sweep ---------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "Run the full benchmark protocol");
    std::string swp_out = "out";
    std::vector<double> swp_d_values{0.125, 0.25, 0.5, 1.0};
    std::vector<std::string> swp_noises{"poisson", "rayleigh"};
    int swp_realizations = 10, swp_threads = 0;
    int swp_width = 128, swp_height = 128;
    uint64_t swp_seed = 1;
    EvolveFlags swp_flags;
    std::string swp_config;
    swp->add_option("--config", swp_config, "Flat key=value config file");
    swp->add_option("--out", swp_out, "Output directory");
    swp->add_option("--seed", swp_seed, "Base seed");
    swp->add_option("--d-values", swp_d_values, "Bhattacharyya distances")
        ->delimiter(',');
    swp->add_option("--noise", swp_noises, "Noise families to contaminate with")
        ->delimiter(',');
    swp->add_option("--realizations", swp_realizations, "Realizations per (noise, D)");
    swp->add_option("--threads", swp_threads, "Worker threads (0: auto)");
    swp->add_option("--width", swp_width, "Image width");
    swp->add_option("--height", swp_height, "Image height");
    swp_flags.attach(swp);

    // ---- evaluate -------------------------------------------------------
    auto* ev = app.add_subcommand("evaluate", "FPF/TPF of a mask against ground truth");
    std::string ev_seg, ev_gt;
    ev->add_option("segmentation", ev_seg, "Segmentation mask image")->required();
    ev->add_option("ground_truth", ev_gt, "Ground-truth mask image")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) apply_config(gen, gen_config);
        if (*seg) apply_config(seg, seg_config);
        if (*swp) apply_config(swp, swp_config);

        if (*gen) {
            BenchmarkSpec spec;
            spec.width = gen_width;
            spec.height = gen_height;
            spec.noise = family_from_name(gen_noise);
            spec.bg = default_bg(spec.noise);
            if (gen_bg > 0.0) spec.bg.p1 = gen_bg;
            if (spec.noise == Family::Gaussian) spec.bg.p2 = gen_sigma;
            spec.target_D = gen_target_d;
            spec.realizations = gen_realizations;
            spec.base_seed = gen_seed;
            return cmd_generate(spec, gen_out);
        }

        if (*seg) {
            ScalarField image;
            try {
                image = read_field(seg_image);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
            SpeedLaw law = law_from_flags(seg_model, seg_estimator);
            EvolveConfig config = seg_flags.to_config(law);
            BoolGrid init = seg_init.empty() ? circle_grid_init(image.width, image.height)
                                             : read_mask(seg_init);
            SegmentResult res = segment(image, init, config);
            fs::create_directories(seg_out);
            write_mask_pgm(seg_out + "/mask.pgm", res.mask);
            write_energy_csv(seg_out + "/energy.csv", res.trace);
            switch (res.status) {
                case RunStatus::Converged: return 0;
                case RunStatus::MaxIter: return 2;
                case RunStatus::Collapsed: return 3;
                default: return 2;
            }
        }

        if (*swp) {
            SweepConfig config;
            config.spec.width = swp_width;
            config.spec.height = swp_height;
            config.spec.realizations = swp_realizations;
            config.spec.base_seed = swp_seed;
            config.D_values = swp_d_values;
            config.noises.clear();
            for (const std::string& n : swp_noises)
                config.noises.push_back(family_from_name(n));
            if (!config.noises.empty())
                config.spec.bg = default_bg(config.noises.front());
            config.evolve = swp_flags.to_config(SpeedLaw::chan_vese());
            config.threads = swp_threads;

            // Each noise family keeps its own default background parameter.
            std::vector<SweepRow> rows;
            for (Family noise : config.noises) {
                SweepConfig one = config;
                one.noises = {noise};
                one.spec.noise = noise;
                one.spec.bg = default_bg(noise);
                std::vector<SweepRow> part = run_sweep(one);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            if (rows.empty()) {
                std::cerr << "error: sweep produced no rows\n";
                return 1;
            }
            fs::create_directories(swp_out);
            {
                std::ofstream out(swp_out + "/results.csv");
                write_rows_csv(out, rows);
            }
            {
                std::ofstream out(swp_out + "/aggregate.csv");
                write_aggregate_csv(out, aggregate(rows));
            }
            {
                std::ofstream out(swp_out + "/plot_results.py");
                out << kPlotScript;
            }
            return 0;
        }

        if (*ev) {
            BoolGrid seg_mask = read_mask(ev_seg);
            BoolGrid gt_mask = read_mask(ev_gt);
            auto [fpf, tpf] = fpf_tpf(seg_mask, gt_mask);
            std::printf("fpf=%.6f tpf=%.6f\n", fpf, tpf);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
