#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmc/baselines.hpp"
#include "dmc/clustering.hpp"
#include "dmc/diffusion.hpp"
#include "dmc/error.hpp"
#include "dmc/matrix_io.hpp"
#include "dmc/pipeline.hpp"
#include "dmc/preprocess.hpp"
#include "dmc/svg.hpp"
#include "dmc/synth.hpp"

namespace {

using nlohmann::json;

//! Input + preprocessing flags shared by the analysis subcommands.
struct InputOpts {
    std::string path;
    bool header = false;
    bool normalize = true;

    void attach(CLI::App* sub) {
        sub->add_option("--input,-i", path, "input matrix (.csv, or .bin/.dmc binary)")
            ->required();
        sub->add_flag("--header", header, "skip the first CSV line");
        sub->add_flag("--normalize,!--no-normalize", normalize,
                      "apply the signed-log transform (default: on)");
    }

    dmc::DataMatrix load() const {
        if (!std::filesystem::exists(path))
            throw dmc::validation_error("input file '" + path + "' does not exist");
        dmc::DataMatrix x = dmc::load_matrix(path, header);
        if (!normalize) return x;
        return dmc::signed_log_normalize(x);
    }
};

//! --epsilon with "unset means scan-and-select".
struct BandwidthOpts {
    double epsilon = 0.0;
    CLI::Option* opt = nullptr;
    unsigned points_per_decade = 10;

    void attach(CLI::App* sub) {
        opt = sub->add_option("--epsilon", epsilon,
                              "kernel bandwidth (default: selected from the weight-sum scan)");
        sub->add_option("--points-per-decade", points_per_decade,
                        "scan resolution used when --epsilon is absent");
    }

    std::optional<double> value() const {
        return opt->count() ? std::optional<double>(epsilon) : std::nullopt;
    }

    double resolve(const dmc::SymmetricMatrix& sq_dists, unsigned workers) const {
        if (opt->count()) {
            if (!(epsilon > 0.0))
                throw dmc::validation_error("epsilon must be > 0, got " +
                                            dmc::format_double(epsilon));
            return epsilon;
        }
        dmc::EpsilonScan scan = dmc::epsilon_scan(sq_dists, {}, points_per_decade, workers);
        return dmc::select_epsilon(scan);
    }
};

void emit_text(const std::string& out_path, const std::string& body) {
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw dmc::io_error("cannot write '" + out_path + "'");
    out << body;
    out.flush();
    if (!out) throw dmc::io_error("write failed for '" + out_path + "'");
}

std::string coords_csv(const dmc::Matrix& coords) {
    std::string s;
    for (std::size_t k = 0; k < coords.cols(); ++k) {
        if (k) s += ',';
        s += "coord_" + std::to_string(k + 1);
    }
    s += '\n';
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        for (std::size_t k = 0; k < coords.cols(); ++k) {
            if (k) s += ',';
            s += dmc::format_double(coords(i, k));
        }
        s += '\n';
    }
    return s;
}

std::string scan_csv(const dmc::EpsilonScan& scan) {
    std::string s = "epsilon,weight_sum,slope\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        s += dmc::format_double(scan.grid[i]);
        s += ',';
        s += dmc::format_double(scan.weight_sums[i]);
        s += ',';
        if (i > 0 && i + 1 < scan.grid.size()) s += dmc::format_double(scan.slope_curve[i - 1]);
        s += '\n';
    }
    return s;
}

std::string corr_matrix_csv(const dmc::SymmetricMatrix& corr) {
    std::string s;
    for (std::size_t i = 0; i < corr.order(); ++i) {
        if (i) s += ',';
        s += "s" + std::to_string(i);
    }
    s += '\n';
    for (std::size_t i = 0; i < corr.order(); ++i) {
        for (std::size_t j = 0; j < corr.order(); ++j) {
            if (j) s += ',';
            s += dmc::format_double(corr(i, j));
        }
        s += '\n';
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dmc: diffusion-map spectral clustering for small-n / large-p matrices"};
    app.set_version_flag("--version", dmc::dmc_version());
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate the planted dense/sparse dataset");
    dmc::SynthSpec synth_spec = dmc::paper_preset();
    std::string synth_preset = "paper", synth_out, synth_truth;
    synth->add_option("--preset", synth_preset, "parameter preset")
        ->check(CLI::IsMember({"paper"}));
    synth->add_option("--n-dense", synth_spec.n_dense, "dense cluster size");
    synth->add_option("--n-sparse", synth_spec.n_sparse, "sparse cluster size");
    synth->add_option("--p", synth_spec.p, "feature count");
    synth->add_option("--dense-spread", synth_spec.dense_spread, "dense cloud RMS radius");
    synth->add_option("--sparse-spread", synth_spec.sparse_spread, "sparse cloud RMS radius");
    synth->add_option("--separation", synth_spec.separation, "distance between cluster centers");
    synth->add_option("--seed", synth_spec.seed, "RNG seed");
    synth->add_option("--out,-o", synth_out, "output matrix path (.csv, .bin/.dmc)")->required();
    synth->add_option("--truth", synth_truth, "also write the planted labels as JSON");
    synth->callback([&] {
        auto [data, truth] = dmc::make_dense_sparse(synth_spec);
        dmc::save_matrix(synth_out, data.matrix());
        if (!synth_truth.empty()) {
            json j;
            j["n"] = truth.size();
            j["k"] = truth.k();
            j["labels"] = truth.labels();
            emit_text(synth_truth, j.dump(2) + "\n");
        }
        std::cout << synth_out << ": " << data.rows() << " x " << data.cols() << ", seed "
                  << synth_spec.seed << "\n";
    });

    // ---- scan ----
    auto* scan_cmd = app.add_subcommand("scan", "sweep the weight sum L(epsilon) and select a bandwidth");
    InputOpts scan_in;
    scan_in.attach(scan_cmd);
    unsigned scan_ppd = 10, scan_workers = 0;
    std::string scan_out, scan_svg;
    scan_cmd->add_option("--points-per-decade", scan_ppd, "scan resolution");
    scan_cmd->add_option("--workers", scan_workers, "thread count (0: all hardware threads)");
    scan_cmd->add_option("--out,-o", scan_out, "write the scan as CSV");
    scan_cmd->add_option("--svg", scan_svg, "write the scan figure");
    scan_cmd->callback([&] {
        const dmc::DataMatrix x = scan_in.load();
        const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(x, scan_workers);
        dmc::EpsilonScan scan = dmc::epsilon_scan(sq, {}, scan_ppd, scan_workers);
        const double eps = dmc::select_epsilon(scan);
        std::cout << "selected epsilon = " << dmc::format_double(eps) << "\n";
        if (!scan_out.empty()) emit_text(scan_out, scan_csv(scan));
        if (!scan_svg.empty()) emit_text(scan_svg, dmc::svg_epsilon_scan(scan));
    });

    // ---- embed ----
    auto* embed_cmd = app.add_subcommand("embed", "compute the diffusion-map coordinates");
    InputOpts embed_in;
    embed_in.attach(embed_cmd);
    BandwidthOpts embed_eps;
    embed_eps.attach(embed_cmd);
    std::size_t embed_dims = 0;
    unsigned embed_workers = 0;
    std::string embed_out;
    embed_cmd->add_option("--dims", embed_dims,
                          "embedding dimension (default: from the spectral decay)");
    embed_cmd->add_option("--workers", embed_workers, "thread count (0: all hardware threads)");
    embed_cmd->add_option("--out,-o", embed_out, "output CSV (default: stdout)");
    embed_cmd->callback([&] {
        const dmc::DataMatrix x = embed_in.load();
        const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(x, embed_workers);
        const double eps = embed_eps.resolve(sq, embed_workers);
        const dmc::AffinityGraph graph = dmc::gaussian_affinity(sq, eps);
        const dmc::DiffusionEmbedding emb = dmc::diffusion_embed(graph, embed_dims);
        std::cerr << "epsilon = " << dmc::format_double(eps) << ", d = " << emb.d << "\n";
        emit_text(embed_out, coords_csv(emb.coords));
    });

    // ---- cluster ----
    auto* cluster_cmd = app.add_subcommand("cluster", "cluster samples and report the labels");
    InputOpts cluster_in;
    cluster_in.attach(cluster_cmd);
    BandwidthOpts cluster_eps;
    cluster_eps.attach(cluster_cmd);
    std::string cluster_method = "all", cluster_linkage = "average", cluster_hier = "raw";
    std::string cluster_out;
    int cluster_k = 2, cluster_restarts = 10;
    std::uint64_t cluster_seed = 42;
    unsigned cluster_workers = 0;
    cluster_cmd->add_option("--method", cluster_method, "which clusterer(s) to run")
        ->check(CLI::IsMember({"spectral", "kmeans", "hierarchical", "all"}));
    cluster_cmd->add_option("--k", cluster_k, "cluster count for k-means and the dendrogram cut");
    cluster_cmd->add_option("--linkage", cluster_linkage, "agglomerative linkage")
        ->check(CLI::IsMember({"single", "complete", "average"}));
    cluster_cmd->add_option("--hier-input", cluster_hier, "euclidean distances on rows, or 1-|corr|")
        ->check(CLI::IsMember({"raw", "correlation"}));
    cluster_cmd->add_option("--seed", cluster_seed, "k-means seed");
    cluster_cmd->add_option("--restarts", cluster_restarts, "k-means restarts");
    cluster_cmd->add_option("--workers", cluster_workers, "thread count (0: all hardware threads)");
    cluster_cmd->add_option("--out,-o", cluster_out, "output JSON (default: stdout)");
    cluster_cmd->callback([&] {
        const dmc::DataMatrix x = cluster_in.load();
        const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(x, cluster_workers);
        json out;
        out["n"] = x.rows();
        const bool all = cluster_method == "all";
        if (all || cluster_method == "spectral") {
            const double eps = cluster_eps.resolve(sq, cluster_workers);
            const dmc::AffinityGraph graph = dmc::gaussian_affinity(sq, eps);
            const dmc::DiffusionEmbedding emb = dmc::diffusion_embed(graph);
            const dmc::SpectralResult sp = dmc::spectral_threshold(emb);
            out["spectral"] = {{"k", sp.partition.k()},
                               {"labels", sp.partition.labels()},
                               {"degenerate", sp.degenerate_split},
                               {"epsilon", eps}};
        }
        if (all || cluster_method == "kmeans") {
            const dmc::KMeansResult km =
                dmc::kmeans(x.matrix(), cluster_k, cluster_seed, cluster_restarts);
            out["kmeans"] = {{"k", km.partition.k()},
                            {"labels", km.partition.labels()},
                            {"wcss", km.wcss},
                            {"iterations", km.iterations}};
        }
        if (all || cluster_method == "hierarchical") {
            dmc::SymmetricMatrix dists;
            if (cluster_hier == "correlation") {
                const dmc::SymmetricMatrix corr = dmc::correlation_matrix(x).matrix();
                dists = dmc::SymmetricMatrix(x.rows()); // 1 - |corr|, zero diagonal
                for (std::size_t i = 0; i < x.rows(); ++i)
                    for (std::size_t j = i; j < x.rows(); ++j)
                        dists.set(i, j, 1.0 - corr(i, j));
            } else {
                dists = dmc::sqrt_distances(sq);
            }
            const dmc::Dendrogram tree =
                dmc::agglomerative(dists, dmc::linkage_from_string(cluster_linkage));
            const dmc::Partition hp = dmc::cut_dendrogram(tree, cluster_k);
            out["hierarchical"] = {{"k", hp.k()},
                                   {"labels", hp.labels()},
                                   {"linkage", cluster_linkage},
                                   {"input", cluster_hier}};
        }
        emit_text(cluster_out, out.dump(2) + "\n");
    });

    // ---- baseline ----
    auto* base_cmd = app.add_subcommand("baseline", "PCA / kernel-PCA comparison embeddings");
    InputOpts base_in;
    base_in.attach(base_cmd);
    BandwidthOpts base_eps;
    base_eps.attach(base_cmd);
    std::string base_method = "pca", base_out;
    std::size_t base_dims = 2;
    unsigned base_workers = 0;
    base_cmd->add_option("--method", base_method, "baseline embedding")
        ->check(CLI::IsMember({"pca", "kpca"}));
    base_cmd->add_option("--dims", base_dims, "number of components");
    base_cmd->add_option("--workers", base_workers, "thread count (0: all hardware threads)");
    base_cmd->add_option("--out,-o", base_out, "output CSV (default: stdout)");
    base_cmd->callback([&] {
        const dmc::DataMatrix x = base_in.load();
        dmc::LinearEmbedding emb;
        if (base_method == "pca") {
            emb = dmc::pca_embed(x, base_dims);
        } else {
            const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(x, base_workers);
            emb = dmc::kernel_pca_embed(x, base_eps.resolve(sq, base_workers), base_dims);
        }
        std::string explained;
        for (std::size_t k = 0; k < emb.explained.size(); ++k) {
            if (k) explained += ", ";
            explained += dmc::format_double(emb.explained[k]);
        }
        std::cerr << "explained variance: " << explained << "\n";
        emit_text(base_out, coords_csv(emb.coords));
    });

    // ---- corr ----
    auto* corr_cmd = app.add_subcommand("corr", "absolute sample-correlation matrix");
    InputOpts corr_in;
    corr_in.attach(corr_cmd);
    std::string corr_out, corr_svg;
    corr_cmd->add_option("--out,-o", corr_out, "output CSV (default: stdout)");
    corr_cmd->add_option("--svg", corr_svg, "write the heatmap figure");
    corr_cmd->callback([&] {
        const dmc::DataMatrix x = corr_in.load();
        const dmc::SymmetricMatrix corr = dmc::correlation_matrix(x).matrix();
        emit_text(corr_out, corr_matrix_csv(corr));
        if (!corr_svg.empty()) {
            const std::vector<dmc::CorrelationPanel> panels = {
                {"all samples (n=" + std::to_string(corr.order()) + ")", corr}};
            emit_text(corr_svg, dmc::svg_correlation(panels));
        }
    });

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "full pipeline: embed, cluster, compare, report");
    dmc::RunConfig cfg;
    std::string run_input, run_out = "dmc-out", run_linkage = "average", run_hier = "raw";
    double run_epsilon = 0.0;
    std::size_t run_dims = 0;
    run_cmd->add_option("--input,-i", run_input, "input matrix (.csv, or .bin/.dmc binary)")
        ->required();
    run_cmd->add_flag("--header", cfg.header, "skip the first CSV line");
    run_cmd->add_flag("--normalize,!--no-normalize", cfg.normalize,
                      "apply the signed-log transform (default: on)");
    auto* run_eps_opt = run_cmd->add_option("--epsilon", run_epsilon,
                                            "kernel bandwidth (default: selected from the scan)");
    auto* run_dims_opt = run_cmd->add_option(
        "--dims", run_dims, "embedding dimension (default: from the spectral decay)");
    run_cmd->add_option("--k", cfg.k, "cluster count for k-means and the dendrogram cut");
    run_cmd->add_option("--linkage", run_linkage, "agglomerative linkage")
        ->check(CLI::IsMember({"single", "complete", "average"}));
    run_cmd->add_option("--hier-input", run_hier, "euclidean distances on rows, or 1-|corr|")
        ->check(CLI::IsMember({"raw", "correlation"}));
    run_cmd->add_option("--seed", cfg.seed, "k-means seed");
    run_cmd->add_option("--restarts", cfg.kmeans_restarts, "k-means restarts");
    run_cmd->add_option("--workers", cfg.workers, "thread count (0: all hardware threads)");
    run_cmd->add_option("--out,-o", run_out, "output directory");
    run_cmd->callback([&] {
        cfg.input = run_input;
        cfg.out_dir = run_out;
        cfg.linkage = dmc::linkage_from_string(run_linkage);
        cfg.hier_input = dmc::hier_input_from_string(run_hier);
        if (run_eps_opt->count()) cfg.epsilon = run_epsilon;
        if (run_dims_opt->count()) cfg.dims = run_dims;
        const dmc::ResultBundle bundle = dmc::run_pipeline(cfg);
        std::cout << "n = " << bundle.n << ", p = " << bundle.p << "\n"
                  << "epsilon = " << dmc::format_double(bundle.epsilon)
                  << (cfg.epsilon ? "" : " (selected)") << "\n"
                  << "d = " << bundle.d << (cfg.dims ? "" : " (chosen)") << "\n"
                  << "all methods equal: " << (bundle.all_methods_equal ? "yes" : "no") << "\n"
                  << "wrote " << bundle.artifacts.size() << " artifacts to " << run_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const dmc::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dmc::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const dmc::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
