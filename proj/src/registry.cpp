#include <algorithm>
#include <sstream>

#include "edibench/metrics.hpp"

namespace edibench {

namespace {

const std::vector<std::string> kInformationMetrics = {"edi", "mig", "mig_sup", "modularity", "dcimig"};

}  // namespace

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"edi", "mig",  "mig_sup", "modularity", "dcimig",
                                                   "sap", "zdiff", "zmin",   "dci",        "dci_forest"};
    return names;
}

MetricSpec MetricSpec::parse(const std::string& text) {
    MetricSpec spec;
    auto at = text.find('@');
    spec.name = text.substr(0, at);
    const auto& names = metric_names();
    if (std::find(names.begin(), names.end(), spec.name) == names.end())
        throw Error(ErrorCode::InvalidArgument, "unknown metric '" + spec.name + "'");
    if (at != std::string::npos) {
        if (!spec.uses_information())
            throw Error(ErrorCode::InvalidArgument, "metric '" + spec.name + "' does not take an estimator");
        spec.estimator = EstimatorChoice::parse(text.substr(at + 1));
    }
    return spec;
}

std::string MetricSpec::label() const { return estimator ? name + "@" + estimator->to_string() : name; }

bool MetricSpec::uses_information() const {
    return std::find(kInformationMetrics.begin(), kInformationMetrics.end(), name) != kInformationMetrics.end();
}

std::vector<MetricSpec> parse_metric_list(const std::string& text) {
    std::vector<MetricSpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") {
            for (const auto& n : metric_names())
                if (n != "dci_forest") out.push_back(MetricSpec{n, std::nullopt});
        } else {
            out.push_back(MetricSpec::parse(item));
        }
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "metric list is empty");
    return out;
}

MetricReport evaluate_metric(const MetricSpec& spec, const Representation& rep, std::uint64_t seed) {
    MetricReport report;
    const std::string label = spec.label();
    InfoOptions options = spec.estimator ? InfoOptions::uniform(*spec.estimator, seed) : InfoOptions::automatic(seed);
    if (spec.name == "edi") {
        auto im = impact_intensity(rep, options);
        report.add(label, Component::Modularity, edi_modularity(im));
        report.add(label, Component::Compactness, edi_compactness(im));
        report.add(label, Component::Explicitness, edi_explicitness(im));
    } else if (spec.name == "mig") {
        report.add(label, Component::Single, mig(rep, options));
    } else if (spec.name == "mig_sup") {
        report.add(label, Component::Single, mig_sup(rep, options));
    } else if (spec.name == "modularity") {
        report.add(label, Component::Single, modularity_score(rep, options));
    } else if (spec.name == "dcimig") {
        report.add(label, Component::Single, dcimig(rep, options));
    } else if (spec.name == "sap") {
        report.add(label, Component::Single, sap(rep));
    } else if (spec.name == "zdiff" || spec.name == "zmin") {
        InterventionConfig cfg;
        cfg.seed = seed;
        report.add(label, Component::Single, spec.name == "zdiff" ? zdiff(rep, cfg) : zminvar(rep, cfg));
    } else if (spec.name == "dci" || spec.name == "dci_forest") {
        DciConfig cfg;
        cfg.seed = seed;
        auto r = spec.name == "dci" ? dci(rep, cfg) : dci_forest(rep, cfg);
        report.add(label, Component::Modularity, r.disentanglement);
        report.add(label, Component::Compactness, r.completeness);
        report.add(label, Component::Explicitness, r.informativeness);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown metric '" + spec.name + "'");
    }
    return report;
}

}  // namespace edibench
