// cgfam: call-graph family classification toolkit.

#include "cgfam/benchmark.hpp"
#include "cgfam/callgraph.hpp"
#include "cgfam/common.hpp"
#include "cgfam/explain.hpp"
#include "cgfam/imagegen.hpp"
#include "cgfam/obfusim.hpp"
#include "cgfam/report.hpp"
#include "cgfam/ssim.hpp"
#include "cgfam/synth.hpp"
#include "cgfam/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace cgfam;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string registry_path;
    std::string report_path;
    bool no_contrastive = false;
};

ApiRegistry registry_from(const Globals& g) {
    if (g.registry_path.empty()) return default_registry();
    return load_registry(read_file(g.registry_path));
}

bool is_graph_path(const std::string& p) { return fs::path(p).extension() == ".json"; }

// Graph documents are featurized on the fly; anything else is an image cache.
FeatureImage load_input(const std::string& path, const ApiRegistry& reg, RunReport& report) {
    if (!is_graph_path(path)) {
        StageTimer t(report, Stage::image_generation);
        auto img = decode_image(read_file(path));
        if (img.registry_hash != reg.content_hash())
            throw HashMismatchError(path + " was featurized with registry " + hex64(img.registry_hash) +
                                    ", expected " + hex64(reg.content_hash()));
        return img;
    }
    CallGraph g;
    {
        StageTimer t(report, Stage::static_analysis);
        g = load_graph(read_file(path), reg);
    }
    StageTimer t(report, Stage::image_generation);
    return featurize(g, reg);
}

void finish(const Globals& g, RunReport& report) {
    for (auto s : kStages)
        std::cerr << stage_name(s) << ": " << report.seconds[static_cast<std::size_t>(s)] << " s\n";
    if (!g.report_path.empty()) {
        report.outputs.push_back(g.report_path);
        write_file(g.report_path, report.to_json());
    }
}

std::uint32_t label_index(const nn::Checkpoint& ck, const std::string& name) {
    for (std::size_t i = 0; i < ck.labels.size(); ++i)
        if (ck.labels[i] == name) return static_cast<std::uint32_t>(i);
    throw UsageError("family '" + name + "' is not a label of this checkpoint");
}

void ensure_dir(const std::string& d) {
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw Error(ErrorKind::input_format, "cannot create directory " + d + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Call-graph family classification with centrality images, contrastive encoders and Grad-CAM++"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--jobs", g.jobs, "Worker threads for featurization and evaluation (0 = all cores)");
    app.add_option("--registry", g.registry_path, "Sensitive API registry file (default: built-in)");
    app.add_option("--report", g.report_path, "Write the run report (JSON) here");

    std::function<void()> run;

    // featurize
    auto* feat = app.add_subcommand("featurize", "Call graph -> centrality feature image");
    std::string feat_in, feat_out, feat_png;
    feat->add_option("graph", feat_in, "Call-graph JSON")->required();
    feat->add_option("-o,--out", feat_out, "Image cache to write")->required();
    feat->add_option("--png", feat_png, "Also export an 8-bit PNG");
    feat->callback([&] {
        run = [&] {
            RunReport report{"featurize", mix_seed(g.seed, 0), g.seed, {}, {}};
            const auto reg = registry_from(g);
            auto img = load_input(feat_in, reg, report);
            write_file(feat_out, encode_image(img));
            report.outputs.push_back(feat_out);
            if (!feat_png.empty()) {
                export_png(img, feat_png);
                report.outputs.push_back(feat_png);
            }
            std::cout << "image " << img.layout.side << "x" << img.layout.side << " digest " << hex64(img.digest())
                      << "\n";
            finish(g, report);
        };
    });

    // shared training options
    SupConConfig train_cfg;
    std::string data_path, out_path, log_path, augment = "pixel", graph_aug;
    double mask = 0.1;
    auto add_train_opts = [&](CLI::App* c) {
        c->add_option("--data", data_path, "Dataset manifest")->required();
        c->add_option("-o,--out", out_path, "Checkpoint to write")->required();
        c->add_option("--epochs", train_cfg.epochs, "Training epochs")->capture_default_str();
        c->add_option("--batch", train_cfg.batch_size, "Batch size")->capture_default_str();
        c->add_option("--lr", train_cfg.learning_rate, "Learning rate")->capture_default_str();
        c->add_option("--momentum", train_cfg.momentum, "SGD momentum")->capture_default_str();
        c->add_option("--weight-decay", train_cfg.weight_decay, "Weight decay")->capture_default_str();
        c->add_option("--log", log_path, "Per-epoch loss CSV");
    };

    auto* tenc = app.add_subcommand("train-encoder", "Contrastive pre-training of the encoder");
    add_train_opts(tenc);
    tenc->add_option("--temperature", train_cfg.temperature, "SupCon temperature")->capture_default_str();
    tenc->add_option("--augment", augment, "pixel or graph")->check(CLI::IsMember({"pixel", "graph"}));
    tenc->add_option("--mask", mask, "Pixel mode: fraction of nonzero pixels masked")->capture_default_str();
    tenc->add_option("--graph-transforms", graph_aug,
                     "Graph mode: transforms drawn per view, separated by ',' (e.g. identity,callind:0.3,junk:10:2)");
    tenc->callback([&] {
        run = [&] {
            train_cfg.seed = g.seed;
            RunReport report{"train-encoder", train_cfg.digest(), g.seed, {}, {}};
            const auto reg = registry_from(g);
            AugmentationPolicy pol;
            pol.mask_fraction = mask;
            if (augment == "graph") {
                pol.mode = AugmentMode::graph;
                std::string_view rest = graph_aug;
                while (!rest.empty()) {
                    auto p = rest.find(',');
                    pol.graph_transforms.push_back(parse_transform(rest.substr(0, p)));
                    rest = p == std::string_view::npos ? std::string_view{} : rest.substr(p + 1);
                }
            }
            LabeledDataset ds;
            {
                StageTimer t(report, Stage::image_generation);
                ds = load_dataset(data_path, reg, pol.mode == AugmentMode::graph, g.jobs);
            }
            if (pol.mode == AugmentMode::graph && !ds.has_graphs())
                throw UsageError("graph augmentation needs a call graph for every dataset item");
            TrainLog log;
            StageTimer t(report, Stage::familial_classification);
            auto ck = train_encoder(ds, train_cfg, pol, nn::EncoderConfig::standard(ds.samples.front().image.layout.side),
                                    &log, &reg, [](std::size_t e, double l) {
                                        std::cerr << "epoch " << e + 1 << " loss " << l << "\n";
                                    });
            save_checkpoint(ck, out_path);
            report.outputs.push_back(out_path);
            if (!log_path.empty()) {
                write_file(log_path, log.csv());
                report.outputs.push_back(log_path);
            }
            finish(g, report);
        };
    });

    auto* tcls = app.add_subcommand("train-classifier", "Linear classifier on a frozen encoder");
    add_train_opts(tcls);
    std::string encoder_path;
    tcls->add_option("--encoder", encoder_path, "Encoder checkpoint from train-encoder");
    tcls->add_flag("--no-contrastive", g.no_contrastive,
                   "Train encoder and classifier jointly with cross-entropy only (no encoder checkpoint)");
    tcls->callback([&] {
        run = [&] {
            train_cfg.seed = g.seed;
            RunReport report{"train-classifier", train_cfg.digest(), g.seed, {}, {}};
            if (g.no_contrastive == !encoder_path.empty())
                throw UsageError("give exactly one of --encoder or --no-contrastive");
            const auto reg = registry_from(g);
            LabeledDataset ds;
            {
                StageTimer t(report, Stage::image_generation);
                ds = load_dataset(data_path, reg, false, g.jobs);
            }
            TrainLog log;
            StageTimer t(report, Stage::familial_classification);
            std::optional<nn::Checkpoint> ck;
            if (g.no_contrastive) {
                ck.emplace(train_joint(ds, train_cfg, nn::EncoderConfig::standard(ds.samples.front().image.layout.side),
                                       &log, [](std::size_t e, double l) {
                                           std::cerr << "epoch " << e + 1 << " loss " << l << "\n";
                                       }));
            } else {
                ck.emplace(train_classifier(nn::load_checkpoint(encoder_path, reg.content_hash()), ds, train_cfg, &log,
                                            g.jobs));
            }
            save_checkpoint(*ck, out_path);
            report.outputs.push_back(out_path);
            if (!log_path.empty()) {
                write_file(log_path, log.csv());
                report.outputs.push_back(log_path);
            }
            const auto m = evaluate(*ck, ds, g.jobs);
            std::cout << "training accuracy " << m.accuracy << " macro-F1 " << m.macro_f1 << "\n";
            finish(g, report);
        };
    });

    // classify
    auto* cls = app.add_subcommand("classify", "Predict the family of a call graph or image");
    std::string model_path, input_path;
    cls->add_option("--model", model_path, "Checkpoint with classifier head")->required();
    cls->add_option("input", input_path, "Call-graph JSON or image cache")->required();
    cls->callback([&] {
        run = [&] {
            RunReport report{"classify", mix_seed(g.seed, 1), g.seed, {}, {}};
            const auto reg = registry_from(g);
            auto ck = nn::load_checkpoint(model_path, reg.content_hash());
            auto img = load_input(input_path, reg, report);
            StageTimer t(report, Stage::familial_classification);
            auto p = classify(ck, img);
            std::cout << "label " << ck.labels.at(p.label) << "\n";
            for (std::size_t c = 0; c < p.scores.size(); ++c) std::cout << ck.labels[c] << " " << p.scores[c] << "\n";
            std::cout.flush();
            finish(g, report);
        };
    });

    // explain
    auto* exp = app.add_subcommand("explain", "Grad-CAM++ heatmap and (API, centrality) attribution");
    std::string target_name, png_path, csv_path, grid_csv;
    int top_k = 10;
    bool gray = false;
    exp->add_option("--model", model_path, "Checkpoint with classifier head")->required();
    exp->add_option("input", input_path, "Call-graph JSON or image cache")->required();
    exp->add_option("--target", target_name, "Family to explain (default: predicted)");
    exp->add_option("--top-k", top_k, "Attribution entries")->capture_default_str();
    exp->add_option("--png", png_path, "Heatmap PNG")->required();
    exp->add_option("--csv", csv_path, "Attribution CSV")->required();
    exp->add_option("--grid-csv", grid_csv, "Per-pixel heatmap CSV");
    exp->add_flag("--gray", gray, "Grayscale PNG instead of the colour map");
    exp->callback([&] {
        run = [&] {
            RunReport report{"explain", mix_seed(g.seed, 2), g.seed, {}, {}};
            const auto reg = registry_from(g);
            auto ck = nn::load_checkpoint(model_path, reg.content_hash());
            auto img = load_input(input_path, reg, report);
            std::uint32_t target;
            {
                StageTimer t(report, Stage::familial_classification);
                target = target_name.empty() ? classify(ck, img).label : label_index(ck, target_name);
            }
            StageTimer t(report, Stage::interpretation);
            auto h = gradcam_pp(ck, img, target);
            auto attr = attribute(h, img.layout, top_k);
            export_heatmap_png(h, png_path, !gray);
            write_file(csv_path, attribution_csv(attr, reg));
            report.outputs.push_back(png_path);
            report.outputs.push_back(csv_path);
            if (!grid_csv.empty()) {
                write_file(grid_csv, heatmap_csv(h, img.layout, reg));
                report.outputs.push_back(grid_csv);
            }
            std::cout << "target " << ck.labels.at(target) << "\n";
            for (const auto& a : attr)
                std::cout << reg.at(a.feature.api) << " " << to_string(a.feature.kind) << " " << a.weight << "\n";
            std::cout.flush();
            finish(g, report);
        };
    });

    // ssim-matrix
    auto* sm = app.add_subcommand("ssim-matrix", "Mean pairwise heatmap SSIM between families");
    std::size_t per_family = 0;
    sm->add_option("--model", model_path, "Checkpoint with classifier head")->required();
    sm->add_option("--data", data_path, "Dataset manifest")->required();
    sm->add_option("-o,--out", out_path, "Matrix CSV")->required();
    sm->add_option("--per-family", per_family, "Use at most this many items per family (0 = all)");
    sm->callback([&] {
        run = [&] {
            RunReport report{"ssim-matrix", mix_seed(g.seed, 3), g.seed, {}, {}};
            const auto reg = registry_from(g);
            auto ck = nn::load_checkpoint(model_path, reg.content_hash());
            LabeledDataset ds;
            {
                StageTimer t(report, Stage::image_generation);
                ds = load_dataset(data_path, reg, false, g.jobs);
            }
            if (per_family) {
                std::vector<std::size_t> keep, seen(ds.families.size(), 0);
                for (std::size_t i = 0; i < ds.size(); ++i)
                    if (seen[ds.samples[i].label]++ < per_family) keep.push_back(i);
                ds = ds.subset(keep);
            }
            StageTimer t(report, Stage::interpretation);
            std::vector<Heatmap> maps(ds.size());
            std::vector<std::uint32_t> labels(ds.size());
            parallel_for(ds.size(), g.jobs, [&](std::size_t i) {
                labels[i] = label_index(ck, ds.families[ds.samples[i].label]);
                maps[i] = gradcam_pp(ck, ds.samples[i].image, labels[i]);
            });
            auto m = heatmap_family_matrix(maps, labels, ck.labels.size(), g.jobs);
            write_file(out_path, family_matrix_csv(m, ck.labels));
            report.outputs.push_back(out_path);
            finish(g, report);
        };
    });

    // obfuscate
    auto* obf = app.add_subcommand("obfuscate", "Apply a call-graph transform spec");
    std::string spec;
    obf->add_option("graph", input_path, "Call-graph JSON")->required();
    obf->add_option("--transform", spec, "e.g. rename+callind:0.5+junk:20:2")->required();
    obf->add_option("-o,--out", out_path, "Transformed call-graph JSON")->required();
    obf->callback([&] {
        run = [&] {
            RunReport report{"obfuscate", mix_seed(g.seed, 4), g.seed, {}, {}};
            const auto t = parse_transform(spec);
            const auto reg = registry_from(g);
            StageTimer timer(report, Stage::static_analysis);
            auto out = apply(t, load_graph(read_file(input_path), reg), reg, g.seed);
            write_file(out_path, serialize_graph(out));
            report.outputs.push_back(out_path);
            std::cout << "nodes " << out.node_count() << " edges " << out.edge_count() << "\n";
            finish(g, report);
        };
    });

    // synth
    auto* syn = app.add_subcommand("synth", "Generate a labeled synthetic call-graph dataset");
    SynthConfig sc;
    syn->add_option("--families", sc.families, "Families")->capture_default_str();
    syn->add_option("--variants", sc.variants, "Variants per family")->capture_default_str();
    syn->add_option("--noise", sc.noise_rate, "Chance of each non-signature API appearing")->capture_default_str();
    syn->add_option("--signature-size", sc.signature_size, "Signature APIs per family")->capture_default_str();
    syn->add_option("--overlap", sc.overlap_budget, "Max shared signature APIs per family pair")->capture_default_str();
    syn->add_option("--out", out_path, "Output directory")->required();
    syn->callback([&] {
        run = [&] {
            sc.seed = g.seed;
            RunReport report{"synth", sc.digest(), g.seed, {}, {}};
            const auto reg = registry_from(g);
            const auto specs = gen_family_specs(sc, reg);
            SynthGraphs graphs;
            {
                StageTimer t(report, Stage::static_analysis);
                graphs = gen_graphs(sc, reg, g.jobs);
            }
            LabeledDataset ds;
            {
                StageTimer t(report, Stage::image_generation);
                ds = featurize_all(std::move(graphs), reg, g.jobs);
            }
            ensure_dir(out_path + "/graphs");
            ensure_dir(out_path + "/images");
            std::vector<std::string> gp(ds.size()), ip(ds.size());
            parallel_for(ds.size(), g.jobs, [&](std::size_t i) {
                gp[i] = "graphs/" + ds.samples[i].name + ".json";
                ip[i] = "images/" + ds.samples[i].name + ".cgfi";
                write_file(out_path + "/" + gp[i], serialize_graph(ds.graphs[i]));
                write_file(out_path + "/" + ip[i], encode_image(ds.samples[i].image));
            });
            const auto manifest = out_path + "/manifest.json";
            write_file(manifest, dataset_manifest(sc, specs, ds, gp, ip));
            report.outputs.push_back(manifest);
            std::cout << ds.size() << " items, digest " << hex64(ds.digest()) << "\n";
            finish(g, report);
        };
    });

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Synthetic ten-fold CV, obfuscation robustness and heatmap SSIM");
    auto bc = BenchmarkConfig::desk(1);
    bool no_ablation = false;
    bench->add_option("--families", bc.synth.families, "Families")->capture_default_str();
    bench->add_option("--variants", bc.synth.variants, "Variants per family")->capture_default_str();
    bench->add_option("--folds", bc.folds, "Cross-validation folds")->capture_default_str();
    bench->add_option("--epochs", bc.encoder.epochs, "Encoder (or joint model) epochs")->capture_default_str();
    bench->add_option("--classifier-epochs", bc.classifier.epochs, "Linear head epochs")->capture_default_str();
    bench->add_flag("--no-contrastive", g.no_contrastive, "Cross-entropy-only pipeline (ablation)");
    bench->add_flag("--no-ablation", no_ablation, "Skip the ablation column of the robustness table");
    bench->add_option("--out", out_path, "Output directory")->required();
    bench->callback([&] {
        run = [&] {
            bc.seed = g.seed;
            bc.synth.seed = g.seed;
            bc.encoder.seed = g.seed;
            bc.classifier.seed = g.seed;
            bc.jobs = g.jobs;
            bc.contrastive = !g.no_contrastive;
            bc.ablation = !no_ablation;
            bc.progress = [](const std::string& m) { std::cerr << m << "\n"; };
            const auto reg = registry_from(g);
            ensure_dir(out_path);
            auto r = run_benchmark(bc, reg);
            auto put = [&](const std::string& name, const std::string& content) {
                write_file(out_path + "/" + name, content);
                r.report.outputs.push_back(out_path + "/" + name);
            };
            put("folds.csv", folds_csv(r.cv));
            put("metrics.json", metrics_json(r.cv.mean));
            put("metrics.csv", metrics_csv(r.cv.mean));
            put("robustness.csv", robustness_csv(r.robustness));
            put("heatmap_ssim.csv", family_matrix_csv(r.heatmap_ssim, r.families));
            nlohmann::json summary = {{"dataset_digest", hex64(r.dataset_digest)},
                                      {"contrastive", bc.contrastive},
                                      {"mean_macro_f1", r.cv.mean.macro_f1},
                                      {"mean_accuracy", r.cv.mean.accuracy},
                                      {"within_family_ssim", r.within_ssim},
                                      {"between_family_ssim", r.between_ssim}};
            put("summary.json", summary.dump(1));
            if (g.report_path.empty()) g.report_path = out_path + "/report.json";
            std::cout << "mean macro-F1 " << r.cv.mean.macro_f1 << " accuracy " << r.cv.mean.accuracy << "\n";
            std::cout << "heatmap SSIM within " << r.within_ssim << " between " << r.between_ssim << "\n";
            std::cout << robustness_csv(r.robustness);
            std::cout.flush();
            finish(g, r.report);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
    }
    try {
        run();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::input_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::usage);
    }
}
