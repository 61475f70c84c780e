#include "gazeaffect/stats_report.hpp"

#include <functional>
#include <optional>

#include "gazeaffect/error.hpp"
#include "gazeaffect/lme.hpp"
#include "gazeaffect/stats.hpp"

namespace gazeaffect::stats {

using nlohmann::json;

namespace {

struct Family {
    explicit Family(std::string n) : name(std::move(n)) {}

    std::string name;
    std::vector<json> rows;
    std::vector<std::size_t> ok;  // indices of rows with a p-value
    std::vector<double> p;

    void add(json row, std::optional<double> p_value) {
        if (p_value) {
            ok.push_back(rows.size());
            p.push_back(*p_value);
        }
        rows.push_back(std::move(row));
    }

    void finish(json& out) {
        const auto adjusted = bonferroni(p, std::max<std::size_t>(rows.size(), 1));
        for (std::size_t k = 0; k < ok.size(); ++k) rows[ok[k]]["p_bonferroni"] = adjusted[k];
        for (auto& row : rows) {
            row["family"] = name;
            row["family_size"] = this->rows.size();
            out.push_back(std::move(row));
        }
    }
};

const std::vector<std::string> kEyeMetrics = {"pupil_mean",        "pupil_max",  "pupil_var",
                                              "fix_duration_mean", "saccade_amplitude_mean",
                                              "prop_eyes",         "prop_mouth"};
const std::vector<std::string> kPupilPredictors = {"pupil_mean", "pupil_max"};
const std::vector<std::string> kRegionPredictors = {"prop_eyes", "prop_eyebrows", "prop_nose", "prop_mouth"};

void correlate(Family& fam, std::span<const FeatureRow> rows, std::optional<Emotion> stimulus,
               const std::string& predictor, const Metric& a, LabelDim label) {
    json row = {{"predictor", predictor}, {"label", label_dim_name(label)}};
    row["stimulus"] = stimulus ? json(std::string(emotion_name(*stimulus))) : json(nullptr);
    try {
        const auto c = participant_correlation(rows, a, label_metric(label), stimulus);
        row["r"] = c.r;
        row["n"] = c.n;
        row["p"] = c.p;
        fam.add(std::move(row), c.p);
    } catch (const Error& e) {
        row["error"] = e.what();
        fam.add(std::move(row), std::nullopt);
    }
}

void lme(Family& fam, std::span<const FeatureRow> rows, const std::string& predictor, const Metric& x,
         LabelDim label, bool binned) {
    json row = {{"predictor", predictor}, {"label", label_dim_name(label)}, {"binned", binned}};
    try {
        const auto fit = fit_lme(lme_data(rows, x, binned ? binned_label_metric(label) : label_metric(label)));
        row["beta0"] = fit.beta0;
        row["beta1"] = fit.beta1;
        row["se_beta1"] = fit.se_beta1;
        row["p"] = fit.p_beta1;
        row["sigma2_u"] = fit.sigma2_u;
        row["sigma2_e"] = fit.sigma2_e;
        row["loglik"] = fit.loglik;
        row["n_obs"] = fit.n_obs;
        row["n_groups"] = fit.n_groups;
        row["degenerate"] = fit.degenerate;
        fam.add(std::move(row), fit.p_beta1);
    } catch (const Error& e) {
        row["error"] = e.what();
        fam.add(std::move(row), std::nullopt);
    }
}

}  // namespace

json build_stats_report(std::span<const FeatureRow> rows) {
    if (rows.empty()) throw Error(Errc::EmptyDataset, "no trials for statistics");
    json report;
    report["correlations"] = json::array();
    report["lme"] = json::array();

    Family traits{"trait_label"};
    for (std::size_t t = 0; t < kTraitCount; ++t)
        for (LabelDim d : kAllLabelDims)
            correlate(traits, rows, std::nullopt, std::string(trait_name(Trait(t))), trait_metric(Trait(t)), d);
    traits.finish(report["correlations"]);

    Family by_stimulus{"stimulus_trait_label"};
    for (Emotion e : kAllEmotions)
        for (std::size_t t = 0; t < kTraitCount; ++t)
            for (LabelDim d : kAllLabelDims)
                correlate(by_stimulus, rows, e, std::string(trait_name(Trait(t))), trait_metric(Trait(t)), d);
    by_stimulus.finish(report["correlations"]);

    Family eye{"eye_metric_label"};
    for (const auto& m : kEyeMetrics)
        for (LabelDim d : kAllLabelDims) correlate(eye, rows, std::nullopt, m, feature_metric(m), d);
    eye.finish(report["correlations"]);

    Family pupil{"lme_pupil"};
    for (LabelDim d : kAllLabelDims)
        for (const auto& m : kPupilPredictors) lme(pupil, rows, m, feature_metric(m), d, false);
    pupil.finish(report["lme"]);

    Family regions_binned{"lme_regions_binned"};
    for (LabelDim d : kAllLabelDims)
        for (const auto& m : kRegionPredictors) lme(regions_binned, rows, m, feature_metric(m), d, true);
    regions_binned.finish(report["lme"]);

    Family regions{"lme_regions"};
    for (LabelDim d : kAllLabelDims)
        for (const auto& m : kRegionPredictors) lme(regions, rows, m, feature_metric(m), d, false);
    regions.finish(report["lme"]);

    Family trait_lme{"lme_traits"};
    for (LabelDim d : kAllLabelDims)
        for (std::size_t t = 0; t < kTraitCount; ++t)
            lme(trait_lme, rows, std::string(trait_name(Trait(t))), trait_metric(Trait(t)), d, false);
    trait_lme.finish(report["lme"]);

    json agree = json::object();
    try {
        const auto a = agreement_all(rows);
        for (LabelDim d : kAllLabelDims) {
            const auto i = static_cast<std::size_t>(d);
            agree[std::string(label_dim_name(d))] = {{"percent", a.percent[i]}, {"tied_clips", a.tied_clips[i]}};
        }
        agree["clips"] = a.clips;
        agree["tie_rule"] = "medium, then low";
    } catch (const Error& e) {
        agree["error"] = e.what();
    }
    report["agreement"] = std::move(agree);
    return report;
}

}  // namespace gazeaffect::stats
