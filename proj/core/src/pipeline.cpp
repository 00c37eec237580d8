#include "dmc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dmc/error.hpp"
#include "dmc/matrix_io.hpp"
#include "dmc/preprocess.hpp"
#include "dmc/svg.hpp"

namespace dmc {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

//! Times a stage and prefixes its name onto any error escaping it.
template <typename Fn>
void with_stage(std::vector<StageTiming>& timings, const char* stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn();
    } catch (const validation_error& e) {
        throw validation_error(std::string(stage) + ": " + e.what());
    } catch (const numerical_error& e) {
        throw numerical_error(std::string(stage) + ": " + e.what(), e.residual());
    } catch (const io_error& e) {
        throw io_error(std::string(stage) + ": " + e.what());
    }
    timings.push_back(
        {stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
}

//! Collects output files so a failed run can remove what it already wrote.
class ArtifactSet {
public:
    explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

    void write_text(const std::string& name, const std::string& body) {
        const fs::path p = dir_ / name;
        written_.push_back(p);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw io_error("cannot write '" + p.string() + "'");
        out << body;
        out.flush();
        if (!out) throw io_error("write failed for '" + p.string() + "'");
    }

    void discard_written() noexcept {
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

std::string join_csv_row(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    s += '\n';
    return s;
}

std::string corr_csv(const SymmetricMatrix& corr, const std::vector<std::size_t>& sample_ids) {
    std::vector<std::string> header(corr.order());
    for (std::size_t i = 0; i < corr.order(); ++i) header[i] = "s" + std::to_string(sample_ids[i]);
    std::string s = join_csv_row(header);
    for (std::size_t i = 0; i < corr.order(); ++i) {
        for (std::size_t j = 0; j < corr.order(); ++j) {
            if (j) s += ',';
            s += format_double(corr(i, j));
        }
        s += '\n';
    }
    return s;
}

//! Mean absolute correlation per cluster-pair block; null for a block with
//! no off-diagonal pair (a singleton cluster).
json block_mean_abs(const SymmetricMatrix& corr,
                    const std::vector<std::vector<std::size_t>>& members) {
    json rows = json::array();
    for (std::size_t a = 0; a < members.size(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < members.size(); ++b) {
            double sum = 0.0;
            std::size_t cnt = 0;
            if (a == b) {
                for (std::size_t i = 0; i < members[a].size(); ++i)
                    for (std::size_t j = i + 1; j < members[a].size(); ++j) {
                        sum += corr(members[a][i], members[a][j]);
                        ++cnt;
                    }
            } else {
                for (std::size_t i : members[a])
                    for (std::size_t j : members[b]) {
                        sum += corr(i, j);
                        ++cnt;
                    }
            }
            row.push_back(cnt ? json(sum / static_cast<double>(cnt)) : json());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

HierarchicalInput hier_input_from_string(const std::string& name) {
    if (name == "raw") return HierarchicalInput::raw;
    if (name == "correlation") return HierarchicalInput::correlation;
    throw validation_error("unknown hierarchical input mode '" + name + "' (raw|correlation)");
}

std::string to_string(HierarchicalInput mode) {
    return mode == HierarchicalInput::raw ? "raw" : "correlation";
}

std::string dmc_version() {
#ifdef DMC_VERSION
    return DMC_VERSION;
#else
    return "0.0.0";
#endif
}

ResultBundle run_pipeline(const RunConfig& cfg) {
    ResultBundle bundle;
    auto& timings = bundle.timings;
    const unsigned workers =
        cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());

    with_stage(timings, "config", [&] {
        if (cfg.input.empty()) throw validation_error("no input path");
        if (!fs::exists(cfg.input))
            throw validation_error("input file '" + cfg.input.string() + "' does not exist");
        if (cfg.epsilon && !(*cfg.epsilon > 0.0))
            throw validation_error("epsilon must be > 0, got " + format_double(*cfg.epsilon));
        if (cfg.dims && *cfg.dims < 1) throw validation_error("dims must be >= 1");
        if (cfg.k < 1) throw validation_error("k must be >= 1");
        if (cfg.kmeans_restarts < 1) throw validation_error("kmeans restarts must be >= 1");
        if (cfg.out_dir.empty()) throw validation_error("no output directory");
    });

    std::optional<DataMatrix> data;
    with_stage(timings, "load", [&] { data.emplace(load_matrix(cfg.input, cfg.header)); });
    bundle.n = data->rows();
    bundle.p = data->cols();

    if (cfg.normalize)
        with_stage(timings, "normalize", [&] { data = signed_log_normalize(*data); });
    bundle.normalized = cfg.normalize;

    SymmetricMatrix sq;
    with_stage(timings, "distances", [&] { sq = pairwise_sq_dists(*data, workers); });

    with_stage(timings, "epsilon", [&] {
        bundle.scan = epsilon_scan(sq, {}, 10, workers);
        if (cfg.epsilon) {
            bundle.epsilon = *cfg.epsilon;
            bundle.scan.selected = bundle.epsilon; // mark the bandwidth in use
        } else {
            bundle.epsilon = select_epsilon(bundle.scan);
        }
    });

    with_stage(timings, "embed", [&] {
        if (cfg.dims && *cfg.dims > bundle.n - 1)
            throw validation_error("dims = " + std::to_string(*cfg.dims) + " exceeds n-1 = " +
                                   std::to_string(bundle.n - 1));
        const AffinityGraph graph = gaussian_affinity(sq, bundle.epsilon);
        DiffusionEmbedding full = diffusion_embed(graph, bundle.n - 1);
        bundle.d = cfg.dims ? *cfg.dims : choose_dim(full.full_spectrum);
        // Keep at least two columns (when available) so scatter plots have a
        // second axis; artifacts report only the first bundle.d columns.
        const std::size_t d_plot = std::max(bundle.d, std::min<std::size_t>(2, bundle.n - 1));
        Matrix coords(bundle.n, d_plot);
        for (std::size_t i = 0; i < bundle.n; ++i)
            for (std::size_t k = 0; k < d_plot; ++k) coords(i, k) = full.coords(i, k);
        bundle.embedding = DiffusionEmbedding{
            std::move(coords),
            std::vector<double>(full.eigenvalues.begin(), full.eigenvalues.begin() + d_plot),
            std::move(full.full_spectrum), std::move(full.basis), d_plot};
    });

    with_stage(timings, "cluster", [&] {
        bundle.spectral = spectral_threshold(bundle.embedding);
        bundle.km = kmeans(data->matrix(), cfg.k, cfg.seed, cfg.kmeans_restarts);

        SymmetricMatrix dists;
        if (cfg.hier_input == HierarchicalInput::correlation) {
            bundle.corr_all = correlation_matrix(*data).matrix();
            dists = SymmetricMatrix(bundle.n); // 1 - |corr|; the diagonal is exactly 0
            for (std::size_t i = 0; i < bundle.n; ++i)
                for (std::size_t j = i; j < bundle.n; ++j)
                    dists.set(i, j, 1.0 - bundle.corr_all(i, j));
        } else {
            dists = sqrt_distances(sq);
        }
        bundle.dendrogram = agglomerative(dists, cfg.linkage);
        bundle.hierarchical = cut_dendrogram(bundle.dendrogram, cfg.k);

        bundle.all_methods_equal =
            partitions_equal(bundle.spectral->partition, bundle.km->partition) &&
            partitions_equal(bundle.spectral->partition, *bundle.hierarchical) &&
            partitions_equal(bundle.km->partition, *bundle.hierarchical);
    });

    with_stage(timings, "baselines", [&] {
        const std::size_t d_pca = std::min({std::size_t{2}, bundle.n, bundle.p});
        bundle.pca = pca_embed(*data, d_pca);
        const std::size_t d_kpca = std::min<std::size_t>(2, bundle.n - 1);
        bundle.kpca = kernel_pca_embed(*data, bundle.epsilon, d_kpca);
    });

    with_stage(timings, "correlate", [&] {
        if (bundle.corr_all.order() == 0)
            bundle.corr_all = correlation_matrix(*data).matrix();
        const Partition& sp = bundle.spectral->partition;
        for (int c = 0; c < sp.k(); ++c) {
            auto idx = sp.members(c);
            SymmetricMatrix sub(idx.size());
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = a; b < idx.size(); ++b)
                    sub.set(a, b, bundle.corr_all(idx[a], idx[b]));
            bundle.cluster_members.push_back(std::move(idx));
            bundle.corr_clusters.push_back(std::move(sub));
        }
    });

    with_stage(timings, "write", [&] {
        const Partition& sp = bundle.spectral->partition;
        const Partition& kp = bundle.km->partition;
        const Partition& hp = *bundle.hierarchical;

        bundle.artifacts = {"embedding.csv", "epsilon_scan.csv", "labels.json", "corr_all.csv"};
        for (std::size_t c = 0; c < bundle.corr_clusters.size(); ++c)
            bundle.artifacts.push_back("corr_cluster" + std::to_string(c) + ".csv");
        for (const char* name : {"report.json", "embedding.svg", "epsilon.svg", "dendrogram.svg",
                                 "corr.svg", "comparison.svg"})
            bundle.artifacts.emplace_back(name);

        // embedding.csv: the reported (first d) coordinates.
        std::string embedding_csv;
        {
            std::vector<std::string> header(bundle.d);
            for (std::size_t k = 0; k < bundle.d; ++k)
                header[k] = "coord_" + std::to_string(k + 1);
            embedding_csv = join_csv_row(header);
            for (std::size_t i = 0; i < bundle.n; ++i) {
                for (std::size_t k = 0; k < bundle.d; ++k) {
                    if (k) embedding_csv += ',';
                    embedding_csv += format_double(bundle.embedding.coords(i, k));
                }
                embedding_csv += '\n';
            }
        }

        std::string scan_csv = "epsilon,weight_sum,slope\n";
        for (std::size_t i = 0; i < bundle.scan.grid.size(); ++i) {
            scan_csv += format_double(bundle.scan.grid[i]);
            scan_csv += ',';
            scan_csv += format_double(bundle.scan.weight_sums[i]);
            scan_csv += ',';
            if (i > 0 && i + 1 < bundle.scan.grid.size())
                scan_csv += format_double(bundle.scan.slope_curve[i - 1]);
            scan_csv += '\n';
        }

        json labels;
        labels["n"] = bundle.n;
        labels["spectral"] = {{"k", sp.k()},
                              {"labels", sp.labels()},
                              {"degenerate", bundle.spectral->degenerate_split}};
        labels["kmeans"] = {{"k", kp.k()}, {"labels", kp.labels()}};
        labels["hierarchical"] = {{"k", hp.k()},
                                  {"labels", hp.labels()},
                                  {"linkage", to_string(cfg.linkage)},
                                  {"input", to_string(cfg.hier_input)}};

        std::vector<std::size_t> all_ids(bundle.n);
        for (std::size_t i = 0; i < bundle.n; ++i) all_ids[i] = i;

        const bool eq_sk = partitions_equal(sp, kp);
        const bool eq_sh = partitions_equal(sp, hp);
        const bool eq_kh = partitions_equal(kp, hp);

        double overall_sum = 0.0;
        std::size_t overall_cnt = 0;
        for (std::size_t i = 0; i < bundle.n; ++i)
            for (std::size_t j = i + 1; j < bundle.n; ++j) {
                overall_sum += bundle.corr_all(i, j);
                ++overall_cnt;
            }

        json rep;
        rep["version"] = dmc_version();
        rep["input"] = {{"path", cfg.input.string()},
                        {"n", bundle.n},
                        {"p", bundle.p},
                        {"normalized", bundle.normalized}};
        // out_dir and workers are runtime knobs with no effect on results;
        // they are left out so reports from such runs stay byte-identical.
        rep["config"] = {{"epsilon", cfg.epsilon ? json(*cfg.epsilon) : json("auto")},
                         {"dims", cfg.dims ? json(*cfg.dims) : json("auto")},
                         {"header", cfg.header},
                         {"hierarchical_input", to_string(cfg.hier_input)},
                         {"k", cfg.k},
                         {"kmeans_restarts", cfg.kmeans_restarts},
                         {"linkage", to_string(cfg.linkage)},
                         {"normalize", cfg.normalize},
                         {"seed", cfg.seed}};
        rep["epsilon"] = {{"mode", cfg.epsilon ? "explicit" : "auto"},
                          {"value", bundle.epsilon},
                          {"scan_points", bundle.scan.grid.size()},
                          {"scan_min", bundle.scan.grid.front()},
                          {"scan_max", bundle.scan.grid.back()}};
        rep["dimension"] = {{"mode", cfg.dims ? "explicit" : "auto"}, {"chosen", bundle.d}};
        rep["spectrum"] = bundle.embedding.full_spectrum;
        rep["embedding"] = {
            {"eigenvalues", std::vector<double>(bundle.embedding.eigenvalues.begin(),
                                                bundle.embedding.eigenvalues.begin() +
                                                    static_cast<std::ptrdiff_t>(bundle.d))}};
        rep["clusters"] = {{"k_requested", cfg.k},
                           {"spectral", labels["spectral"]},
                           {"kmeans",
                            {{"k", kp.k()},
                             {"labels", kp.labels()},
                             {"wcss", bundle.km->wcss},
                             {"iterations", bundle.km->iterations},
                             {"restarts", cfg.kmeans_restarts}}},
                           {"hierarchical", labels["hierarchical"]}};
        rep["agreement"] = {{"spectral_vs_kmeans", eq_sk},
                            {"spectral_vs_hierarchical", eq_sh},
                            {"kmeans_vs_hierarchical", eq_kh},
                            {"all_methods_equal", bundle.all_methods_equal}};
        json sizes = json::array();
        for (const auto& mem : bundle.cluster_members) sizes.push_back(mem.size());
        rep["correlation"] = {
            {"overall_mean_abs",
             overall_cnt ? json(overall_sum / static_cast<double>(overall_cnt)) : json()},
            {"cluster_sizes", sizes},
            {"block_mean_abs", block_mean_abs(bundle.corr_all, bundle.cluster_members)}};
        rep["baselines"] = {
            {"pca", {{"d", bundle.pca.d}, {"explained", bundle.pca.explained}}},
            {"kernel_pca",
             {{"d", bundle.kpca.d}, {"epsilon", bundle.epsilon}, {"explained", bundle.kpca.explained}}}};
        rep["artifacts"] = bundle.artifacts;
        json tj = json::object();
        for (const auto& st : timings) tj[st.stage] = st.seconds;
        rep["timings"] = tj;

        std::vector<CorrelationPanel> panels;
        panels.push_back({"all samples (n=" + std::to_string(bundle.n) + ")", bundle.corr_all});
        for (std::size_t c = 0; c < bundle.corr_clusters.size(); ++c)
            panels.push_back({"cluster " + std::to_string(c) + " (n=" +
                                  std::to_string(bundle.cluster_members[c].size()) + ")",
                              bundle.corr_clusters[c]});

        std::vector<ComparisonSeries> series;
        series.push_back({"diffusion", bundle.embedding.coords});
        series.push_back({"pca", bundle.pca.coords});
        series.push_back({"kernel pca", bundle.kpca.coords});

        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec)
            throw io_error("cannot create output directory '" + cfg.out_dir.string() +
                           "': " + ec.message());

        ArtifactSet art(cfg.out_dir);
        try {
            art.write_text("embedding.csv", embedding_csv);
            art.write_text("epsilon_scan.csv", scan_csv);
            art.write_text("labels.json", labels.dump(2) + "\n");
            art.write_text("corr_all.csv", corr_csv(bundle.corr_all, all_ids));
            for (std::size_t c = 0; c < bundle.corr_clusters.size(); ++c)
                art.write_text("corr_cluster" + std::to_string(c) + ".csv",
                               corr_csv(bundle.corr_clusters[c], bundle.cluster_members[c]));
            art.write_text("report.json", rep.dump(2) + "\n");
            art.write_text("embedding.svg", svg_embedding(bundle.embedding.coords, sp.labels()));
            art.write_text("epsilon.svg", svg_epsilon_scan(bundle.scan));
            art.write_text("dendrogram.svg", svg_dendrogram(bundle.dendrogram, cfg.linkage));
            art.write_text("corr.svg", svg_correlation(panels));
            art.write_text("comparison.svg", svg_comparison(series, sp.labels()));
        } catch (...) {
            art.discard_written();
            throw;
        }
    });

    return bundle;
}

} // namespace dmc
