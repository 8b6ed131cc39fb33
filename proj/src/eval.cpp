#include "exfseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>
#include <tuple>

namespace exfseg {

ConfusionCounts confusion(const BoolGrid& seg, const BoolGrid& gt) {
    if (seg.width != gt.width || seg.height != gt.height)
        throw std::invalid_argument("confusion: dimension mismatch");
    ConfusionCounts c;
    for (size_t i = 0; i < seg.data.size(); ++i) {
        bool s = seg.data[i] != 0, g = gt.data[i] != 0;
        if (g)
            s ? ++c.tp : ++c.fn;
        else
            s ? ++c.fp : ++c.tn;
    }
    return c;
}

std::pair<double, double> fpf_tpf(const BoolGrid& seg, const BoolGrid& gt) {
    ConfusionCounts c = confusion(seg, gt);
    if (c.tp + c.fn == 0 || c.fp + c.tn == 0)
        throw std::invalid_argument("fpf_tpf: ground truth has a single class");
    double fpf = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    double tpf = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {fpf, tpf};
}

BoolGrid circle_grid_init(int width, int height, double radius, double spacing) {
    BoolGrid mask(width, height);
    for (double cy = spacing * 0.5; cy < height; cy += spacing)
        for (double cx = spacing * 0.5; cx < width; cx += spacing)
            for (int y = std::max(0, static_cast<int>(cy - radius));
                 y <= std::min(height - 1, static_cast<int>(cy + radius)); ++y)
                for (int x = std::max(0, static_cast<int>(cx - radius));
                     x <= std::min(width - 1, static_cast<int>(cx + radius)); ++x) {
                    double dx = x - cx, dy = y - cy;
                    if (dx * dx + dy * dy <= radius * radius) mask.at(x, y) = true;
                }
    return mask;
}

namespace {

struct SweepCell {
    Family noise;
    double D;
    int realization;
};

std::vector<SweepRow> run_cell(const SweepConfig& config, const BoolGrid& gt,
                               const BoolGrid& init, const SweepCell& cell,
                               uint64_t seed) {
    NoiseParams bg = config.spec.bg;
    NoiseParams fg = calibrate(cell.noise, bg, cell.D);
    ScalarField image = corrupt(gt, cell.noise, fg, bg, seed);

    std::vector<SweepRow> rows;
    for (const SpeedLaw& law : config.functionals) {
        EvolveConfig evolve = config.evolve;
        evolve.law = law;
        SegmentResult res = segment(image, init, evolve);
        auto [fpf, tpf] = fpf_tpf(res.mask, gt);
        SweepRow row;
        row.noise = cell.noise;
        row.D = cell.D;
        row.functional = law.name();
        row.seed = seed;
        row.fpf = fpf;
        row.tpf = tpf;
        row.iterations = res.iterations;
        row.final_energy = res.trace.back().total;
        row.initial_energy = res.trace.front().total;
        row.collapsed = res.status == RunStatus::Collapsed;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    BenchmarkSpec spec = config.spec;
    if (spec.shapes.empty())
        spec.shapes = default_phantom_shapes(spec.width, spec.height);
    BoolGrid gt = make_phantom(spec);
    BoolGrid init = circle_grid_init(spec.width, spec.height);

    std::vector<SweepCell> cells;
    uint64_t index = 0;
    std::vector<uint64_t> seeds;
    for (Family noise : config.noises)
        for (double D : config.D_values)
            for (int r = 0; r < spec.realizations; ++r) {
                cells.push_back({noise, D, r});
                seeds.push_back(child_seed(spec.base_seed, index++));
            }

    std::vector<std::vector<SweepRow>> per_cell(cells.size());
    unsigned n_threads = config.threads > 0
                             ? static_cast<unsigned>(config.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, cells.size() == 0 ? 1 : cells.size());

    std::mutex next_mutex;
    size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= cells.size()) return;
                i = next++;
            }
            per_cell[i] = run_cell(config, gt, init, cells[i], seeds[i]);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<SweepRow> rows;
    for (auto& cell_rows : per_cell)
        for (auto& r : cell_rows) rows.push_back(std::move(r));
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.noise, a.D, a.functional, a.seed) <
               std::tie(b.noise, b.D, b.functional, b.seed);
    });
    return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate: empty result");
    std::vector<AggregateRow> out;
    size_t i = 0;
    while (i < rows.size()) {
        size_t j = i;
        double sf = 0, sf2 = 0, st = 0, st2 = 0;
        while (j < rows.size() && rows[j].noise == rows[i].noise &&
               rows[j].D == rows[i].D && rows[j].functional == rows[i].functional) {
            sf += rows[j].fpf;
            sf2 += rows[j].fpf * rows[j].fpf;
            st += rows[j].tpf;
            st2 += rows[j].tpf * rows[j].tpf;
            ++j;
        }
        double n = static_cast<double>(j - i);
        AggregateRow a;
        a.noise = rows[i].noise;
        a.D = rows[i].D;
        a.functional = rows[i].functional;
        a.n = static_cast<int>(n);
        a.mean_fpf = sf / n;
        a.mean_tpf = st / n;
        a.std_fpf = std::sqrt(std::max(sf2 / n - a.mean_fpf * a.mean_fpf, 0.0));
        a.std_tpf = std::sqrt(std::max(st2 / n - a.mean_tpf * a.mean_tpf, 0.0));
        out.push_back(a);
        i = j;
    }
    return out;
}

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "noise,D,functional,seed,fpf,tpf,iterations,final_energy,collapsed\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%s,%llu,%.10g,%.10g,%d,%.10g,%d\n",
                      family_name(r.noise), r.D, r.functional.c_str(),
                      static_cast<unsigned long long>(r.seed), r.fpf, r.tpf,
                      r.iterations, r.final_energy, r.collapsed ? 1 : 0);
        os << buf;
    }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "noise,D,functional,mean_fpf,std_fpf,mean_tpf,std_tpf,n\n";
    char buf[256];
    for (const AggregateRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%s,%.10g,%.10g,%.10g,%.10g,%d\n",
                      family_name(r.noise), r.D, r.functional.c_str(), r.mean_fpf,
                      r.std_fpf, r.mean_tpf, r.std_tpf, r.n);
        os << buf;
    }
}

} // namespace exfseg
