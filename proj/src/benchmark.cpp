#include "cgfam/benchmark.hpp"

#include "cgfam/common.hpp"
#include "cgfam/explain.hpp"
#include "cgfam/obfusim.hpp"
#include "cgfam/ssim.hpp"

#include <sstream>

namespace cgfam {

BenchmarkConfig BenchmarkConfig::desk(std::uint64_t seed) {
    BenchmarkConfig c;
    c.seed = seed;
    c.synth.seed = seed;
    c.encoder.seed = seed;
    c.encoder.epochs = 10;
    c.classifier.seed = seed;
    c.classifier.epochs = 100;
    return c;
}

std::uint64_t BenchmarkConfig::digest() const {
    Digest d;
    d.u64(synth.digest()).u64(folds).u64(encoder.digest()).u64(classifier.digest()).u64(policy.digest());
    d.u64(network ? network->digest() : 0).u64(contrastive).u64(ablation).u64(robustness_fold).u64(seed);
    return d.value();
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, const ApiRegistry& registry) {
    auto say = [&](const std::string& m) {
        if (cfg.progress) cfg.progress(m);
    };
    BenchmarkResult r;
    r.report.command = "benchmark";
    r.report.config_digest = cfg.digest();
    r.report.seed = cfg.seed;

    SynthGraphs graphs;
    {
        StageTimer t(r.report, Stage::static_analysis);
        graphs = gen_graphs(cfg.synth, registry, cfg.jobs);
    }
    LabeledDataset ds;
    {
        StageTimer t(r.report, Stage::image_generation);
        ds = featurize_all(std::move(graphs), registry, cfg.jobs);
    }
    r.families = ds.families;
    r.dataset_digest = ds.digest();
    say("dataset " + std::to_string(ds.size()) + " items, digest " + hex64(r.dataset_digest));

    const auto net = cfg.network.value_or(nn::EncoderConfig::standard(ds.samples.front().image.layout.side));
    auto fold_cfg = [&](const SupConConfig& base, std::size_t fold) {
        SupConConfig c = base;
        c.seed = mix_seed(base.seed, fold);
        return c;
    };
    auto train_contrastive = [&](const LabeledDataset& train, std::size_t fold) {
        auto ck = train_encoder(train, fold_cfg(cfg.encoder, fold), cfg.policy, net, nullptr, &registry,
                                [&](std::size_t e, double loss) {
                                    say("fold " + std::to_string(fold) + " epoch " + std::to_string(e + 1) +
                                        " supcon " + std::to_string(loss));
                                });
        return train_classifier(std::move(ck), train, fold_cfg(cfg.classifier, fold), nullptr, cfg.jobs);
    };
    auto train_plain = [&](const LabeledDataset& train, std::size_t fold) {
        return train_joint(train, fold_cfg(cfg.encoder, fold), net, nullptr, [&](std::size_t e, double loss) {
            say("fold " + std::to_string(fold) + " epoch " + std::to_string(e + 1) + " cross-entropy " +
                std::to_string(loss));
        });
    };

    const auto splits = fold_splits(stratified_folds(ds.labels(), ds.families.size(), cfg.folds, cfg.seed), cfg.folds);
    if (cfg.robustness_fold >= cfg.folds) throw UsageError("robustness fold out of range");
    std::optional<nn::Checkpoint> wi, wo;
    {
        StageTimer t(r.report, Stage::familial_classification);
        r.cv = crossvalidate(
            ds, cfg.folds, cfg.seed,
            [&](const LabeledDataset& train, std::size_t fold) {
                auto ck = cfg.contrastive ? train_contrastive(train, fold) : train_plain(train, fold);
                if (fold == cfg.robustness_fold) (cfg.contrastive ? wi : wo).emplace(ck);
                return ck;
            },
            cfg.jobs);
        for (std::size_t f = 0; f < cfg.folds; ++f)
            say("fold " + std::to_string(f) + " macro-F1 " + std::to_string(r.cv.folds[f].macro_f1));
        if (cfg.contrastive && cfg.ablation) {
            say("training cross-entropy-only model for the robustness table");
            wo.emplace(train_plain(ds.subset(splits[cfg.robustness_fold].train), cfg.robustness_fold));
        }
    }

    const auto test = ds.subset(splits[cfg.robustness_fold].test);
    std::vector<ObfuscatorRow> rows = {{"None", "Original", Transform{}}};
    for (auto& row : obfuscator_table()) rows.push_back(std::move(row));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        LabeledDataset variant = test;
        {
            StageTimer t(r.report, Stage::image_generation);
            parallel_for(variant.size(), cfg.jobs, [&](std::size_t i) {
                const auto g = apply(rows[k].transform, test.graphs[i], registry, mix_seed(mix_seed(cfg.seed, k), i));
                variant.samples[i].image = featurize(g, registry);
            });
        }
        StageTimer t(r.report, Stage::familial_classification);
        RobustnessRow out{rows[k].group, rows[k].name, to_string(rows[k].transform), std::nullopt, std::nullopt};
        if (wi) out.with_contrastive = evaluate(*wi, variant, cfg.jobs);
        if (wo) out.without_contrastive = evaluate(*wo, variant, cfg.jobs);
        r.robustness.push_back(std::move(out));
    }

    {
        StageTimer t(r.report, Stage::interpretation);
        const nn::Checkpoint& model = wi ? *wi : *wo;
        std::vector<Heatmap> maps(test.size());
        parallel_for(test.size(), cfg.jobs, [&](std::size_t i) {
            maps[i] = gradcam_pp(model, test.samples[i].image, test.samples[i].label);
        });
        r.heatmap_ssim = heatmap_family_matrix(maps, test.labels(), ds.families.size(), cfg.jobs);
        const std::size_t F = ds.families.size();
        double within = 0.0, between = 0.0;
        for (std::size_t f = 0; f < F; ++f)
            for (std::size_t g = 0; g < F; ++g) (f == g ? within : between) += r.heatmap_ssim[f][g];
        r.within_ssim = within / static_cast<double>(F);
        r.between_ssim = between / static_cast<double>(F * (F - 1));
    }
    return r;
}

std::string folds_csv(const CrossValResult& cv) {
    std::ostringstream os;
    os.precision(6);
    os << "fold,accuracy,macro_f1\n";
    for (std::size_t f = 0; f < cv.folds.size(); ++f)
        os << f << ',' << cv.folds[f].accuracy << ',' << cv.folds[f].macro_f1 << '\n';
    os << "mean," << cv.mean.accuracy << ',' << cv.mean.macro_f1 << '\n';
    return os.str();
}

std::string robustness_csv(const std::vector<RobustnessRow>& rows) {
    std::ostringstream os;
    os.precision(6);
    os << "group,obfuscator,transform,wi_accuracy,wi_macro_f1,wo_accuracy,wo_macro_f1\n";
    auto cell = [&](const std::optional<Metrics>& m) {
        if (m)
            os << ',' << m->accuracy << ',' << m->macro_f1;
        else
            os << ",,";
    };
    for (const auto& r : rows) {
        os << r.group << ',' << r.name << ',' << r.transform;
        cell(r.with_contrastive);
        cell(r.without_contrastive);
        os << '\n';
    }
    return os.str();
}

}  // namespace cgfam
