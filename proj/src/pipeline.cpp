#include "selfrocket/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "selfrocket/error.hpp"
#include "selfrocket/rng.hpp"
#include "selfrocket/version.hpp"

namespace selfrocket {

namespace {

using nlohmann::json;

std::uint64_t plan_seed(std::uint64_t master, Representation rep) {
    return derive_seed(master, {hash_str("plan"), static_cast<std::uint64_t>(rep)});
}

// Materialize one combo's full feature block as a dense row-major matrix.
RowMatrixXd materialize(const ComboFeatures& view) {
    RowMatrixXd X(view.rows(), view.cols());
    for (std::size_t r = 0; r < view.rows(); ++r)
        for (std::size_t c = 0; c < view.cols(); ++c) X(r, c) = view.at(r, c);
    return X;
}

void check_trainable(const TimeSeriesDataset& train) {
    train.validate();
    if (train.num_classes() < 2)
        throw DegenerateLabelsError("training set '" + train.name + "' holds a single class");
}

} // namespace

FittedModel fit(const TimeSeriesDataset& train, const SelectionConfig& cfg, std::uint64_t seed,
                std::size_t num_features_target) {
    check_trainable(train);
    cfg.validate();

    FittedModel m;
    m.meta.dataset = train.name;
    m.meta.seed = seed;
    m.meta.library_version = kLibraryVersion;
    m.cfg = cfg;
    m.class_names = train.class_names;

    m.base_plan = fit_plan(train, num_features_target, Representation::kBase, plan_seed(seed, Representation::kBase));
    m.diff_plan = fit_plan(train, num_features_target, Representation::kDiff, plan_seed(seed, Representation::kDiff));

    const FeatureBundle fb = transform(train, *m.base_plan, *m.diff_plan);

    SelectionConfig sel_cfg = cfg;
    sel_cfg.seed = derive_seed(seed, {hash_str("selection")});
    const SelectionResult sel = select_features(fb, train.labels, train.num_classes(), sel_cfg, &train.class_names);
    m.combo = sel.final;
    m.raw_vote = sel.raw_vote;
    m.consensus = sel.consensus;
    m.retained = sel.retained;
    m.selection_used = true;
    m.table = sel.table;

    const RowMatrixXd X = materialize(combo_view(fb, m.combo));
    m.ridge = fit_ridge(X, train.labels, train.num_classes());

    // Drop the plan a BASE-only or DIFF-only combo will never use again.
    if (m.combo.rep == Representation::kBase) m.diff_plan.reset();
    if (m.combo.rep == Representation::kDiff) m.base_plan.reset();
    return m;
}

FittedModel fit_fixed(const TimeSeriesDataset& train, ComboId combo, const SelectionConfig& cfg, std::uint64_t seed,
                      std::size_t num_features_target) {
    check_trainable(train);
    cfg.validate();

    FittedModel m;
    m.meta.dataset = train.name;
    m.meta.seed = seed;
    m.meta.library_version = kLibraryVersion;
    m.cfg = cfg;
    m.class_names = train.class_names;
    m.combo = m.raw_vote = combo;
    m.selection_used = false;

    const bool want_base = combo.rep != Representation::kDiff;
    const bool want_diff = combo.rep != Representation::kBase;
    if (want_base)
        m.base_plan = fit_plan(train, num_features_target, Representation::kBase, plan_seed(seed, Representation::kBase));
    if (want_diff)
        m.diff_plan = fit_plan(train, num_features_target, Representation::kDiff, plan_seed(seed, Representation::kDiff));

    const Matrix feats = transform_single(train, combo, m.base_plan ? &*m.base_plan : nullptr,
                                          m.diff_plan ? &*m.diff_plan : nullptr);
    m.ridge = fit_ridge(as_eigen(feats), train.labels, train.num_classes());
    return m;
}

std::vector<int> predict(const FittedModel& m, const TimeSeriesDataset& ds) {
    if (ds.n == 0) throw EmptyInputError("predict: empty dataset");
    const Matrix feats = transform_single(ds, m.combo, m.base_plan ? &*m.base_plan : nullptr,
                                          m.diff_plan ? &*m.diff_plan : nullptr);
    return ridge_predict(m.ridge, as_eigen(feats));
}

OracleResult fit_oracle(const TimeSeriesDataset& train, const TimeSeriesDataset& test, std::uint64_t seed,
                        std::size_t num_features_target) {
    check_trainable(train);
    test.validate();
    if (train.length != test.length)
        throw ShapeError("fit_oracle: train length " + std::to_string(train.length) + " != test length " +
                         std::to_string(test.length));
    if (train.class_names != test.class_names) throw ShapeError("fit_oracle: train and test class names differ");

    const TransformPlan base_plan =
        fit_plan(train, num_features_target, Representation::kBase, plan_seed(seed, Representation::kBase));
    const TransformPlan diff_plan =
        fit_plan(train, num_features_target, Representation::kDiff, plan_seed(seed, Representation::kDiff));

    const FeatureBundle ftr = transform(train, base_plan, diff_plan);
    const FeatureBundle fte = transform(test, base_plan, diff_plan);

    OracleResult res;
    res.best = combo_at(0);
    double best_acc = -1.0;
    for (int t = 0; t < kNumCombos; ++t) {
        const RowMatrixXd Xtr = materialize(combo_view(ftr, combo_at(t)));
        const RidgeModel rm = fit_ridge(Xtr, train.labels, train.num_classes());
        const RowMatrixXd Xte = materialize(combo_view(fte, combo_at(t)));
        res.accuracies[t] = accuracy(ridge_predict(rm, Xte), test.labels);
        if (res.accuracies[t] > best_acc) { // strict: ties keep enumeration order
            best_acc = res.accuracies[t];
            res.best = combo_at(t);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json plan_to_json(const TransformPlan& p) {
    return json{{"rep", static_cast<int>(p.rep)},
                {"input_length", p.input_length},
                {"dilations", p.dilations},
                {"features_per_dilation", p.features_per_dilation},
                {"biases", p.biases},
                {"paddings", p.paddings},
                {"seed", p.seed}};
}

TransformPlan plan_from_json(const json& j) {
    TransformPlan p;
    p.rep = static_cast<Representation>(j.at("rep").get<int>());
    p.input_length = j.at("input_length").get<std::size_t>();
    p.dilations = j.at("dilations").get<std::vector<int>>();
    p.features_per_dilation = j.at("features_per_dilation").get<std::vector<int>>();
    p.biases = j.at("biases").get<std::vector<double>>();
    p.paddings = j.at("paddings").get<std::vector<std::uint8_t>>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (p.biases.size() != p.num_features() || p.paddings.size() != p.num_features() ||
        p.dilations.size() != p.features_per_dilation.size())
        throw IntegrityError("model file: transform plan arrays are inconsistent");
    return p;
}

json vecd_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vecd_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.n_rows}, {"cols", m.n_cols}, {"data", m.v}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m;
    m.n_rows = j.at("rows").get<std::size_t>();
    m.n_cols = j.at("cols").get<std::size_t>();
    m.v = j.at("data").get<std::vector<double>>();
    if (m.v.size() != m.n_rows * m.n_cols) throw IntegrityError("model file: matrix payload size mismatch");
    return m;
}

json model_payload(const FittedModel& m) {
    json ridge{{"num_classes", m.ridge.num_classes},
               {"num_features", m.ridge.num_features},
               {"alpha", m.ridge.alpha},
               {"alpha_grid", m.ridge.alpha_grid},
               {"loo_errors", m.ridge.loo_errors},
               {"intercepts", vecd_to_json(m.ridge.intercepts)},
               {"means", vecd_to_json(m.ridge.means)},
               {"scales", vecd_to_json(m.ridge.scales)}};
    {
        std::vector<double> w(m.ridge.weights.size());
        for (int c = 0; c < m.ridge.num_classes; ++c)
            for (std::size_t f = 0; f < m.ridge.num_features; ++f)
                w[c * m.ridge.num_features + f] = m.ridge.weights(c, static_cast<Eigen::Index>(f));
        ridge["weights"] = w; // row-major, class-major
    }
    json payload{{"class_names", m.class_names},
                 {"combo", combo_name(m.combo)},
                 {"raw_vote", combo_name(m.raw_vote)},
                 {"consensus", m.consensus},
                 {"retained", m.retained},
                 {"selection_used", m.selection_used},
                 {"cfg",
                  json{{"k", m.cfg.k},
                       {"nr", m.cfg.nr},
                       {"f", m.cfg.f},
                       {"mds", m.cfg.mds},
                       {"top", m.cfg.top},
                       {"thresh", m.cfg.thresh},
                       {"default_combo", combo_name(m.cfg.default_combo)},
                       {"seed", m.cfg.seed}}},
                 {"metadata",
                  json{{"dataset", m.meta.dataset},
                       {"seed", m.meta.seed},
                       {"library_version", m.meta.library_version},
                       {"znormalized", m.meta.znormalized}}},
                 {"ridge", ridge},
                 {"table", matrix_to_json(m.table)}};
    payload["base_plan"] = m.base_plan ? plan_to_json(*m.base_plan) : json(nullptr);
    payload["diff_plan"] = m.diff_plan ? plan_to_json(*m.diff_plan) : json(nullptr);
    return payload;
}

FittedModel model_from_payload(const json& p) {
    FittedModel m;
    m.class_names = p.at("class_names").get<std::vector<std::string>>();
    m.combo = parse_combo(p.at("combo").get<std::string>());
    m.raw_vote = parse_combo(p.at("raw_vote").get<std::string>());
    m.consensus = p.at("consensus").get<double>();
    m.retained = p.at("retained").get<bool>();
    m.selection_used = p.at("selection_used").get<bool>();
    const json& c = p.at("cfg");
    m.cfg.k = c.at("k").get<int>();
    m.cfg.nr = c.at("nr").get<int>();
    m.cfg.f = c.at("f").get<int>();
    m.cfg.mds = c.at("mds").get<int>();
    m.cfg.top = c.at("top").get<int>();
    m.cfg.thresh = c.at("thresh").get<double>();
    m.cfg.default_combo = parse_combo(c.at("default_combo").get<std::string>());
    m.cfg.seed = c.at("seed").get<std::uint64_t>();
    const json& md = p.at("metadata");
    m.meta.dataset = md.at("dataset").get<std::string>();
    m.meta.seed = md.at("seed").get<std::uint64_t>();
    m.meta.library_version = md.at("library_version").get<std::string>();
    m.meta.znormalized = md.at("znormalized").get<bool>();
    if (!p.at("base_plan").is_null()) m.base_plan = plan_from_json(p.at("base_plan"));
    if (!p.at("diff_plan").is_null()) m.diff_plan = plan_from_json(p.at("diff_plan"));
    const json& r = p.at("ridge");
    m.ridge.num_classes = r.at("num_classes").get<int>();
    m.ridge.num_features = r.at("num_features").get<std::size_t>();
    m.ridge.alpha = r.at("alpha").get<double>();
    m.ridge.alpha_grid = r.at("alpha_grid").get<std::vector<double>>();
    m.ridge.loo_errors = r.at("loo_errors").get<std::vector<double>>();
    m.ridge.intercepts = vecd_from_json(r.at("intercepts"));
    m.ridge.means = vecd_from_json(r.at("means"));
    m.ridge.scales = vecd_from_json(r.at("scales"));
    {
        const auto w = r.at("weights").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(m.ridge.num_classes) * m.ridge.num_features)
            throw IntegrityError("model file: ridge weight payload size mismatch");
        m.ridge.weights.resize(m.ridge.num_classes, static_cast<Eigen::Index>(m.ridge.num_features));
        for (int cc = 0; cc < m.ridge.num_classes; ++cc)
            for (std::size_t f = 0; f < m.ridge.num_features; ++f)
                m.ridge.weights(cc, static_cast<Eigen::Index>(f)) = w[cc * m.ridge.num_features + f];
    }
    m.table = matrix_from_json(p.at("table"));

    if (m.ridge.intercepts.size() != m.ridge.num_classes ||
        m.ridge.means.size() != static_cast<Eigen::Index>(m.ridge.num_features) ||
        m.ridge.scales.size() != static_cast<Eigen::Index>(m.ridge.num_features))
        throw IntegrityError("model file: ridge vector sizes are inconsistent");
    if (static_cast<int>(m.class_names.size()) != m.ridge.num_classes)
        throw IntegrityError("model file: class name count does not match the classifier");
    const bool want_base = m.combo.rep != Representation::kDiff;
    const bool want_diff = m.combo.rep != Representation::kBase;
    if ((want_base && !m.base_plan) || (want_diff && !m.diff_plan))
        throw IntegrityError("model file: missing the transform plan for combo " + combo_name(m.combo));
    return m;
}

} // namespace

void save_model(const FittedModel& m, const std::string& path) {
    const json payload = model_payload(m);
    json root{{"format", "selfrocket-model"},
              {"version", kModelFormatVersion},
              {"checksum", fnv1a_hex(payload.dump())},
              {"payload", payload}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOError("cannot write: " + tmp);
        out << root.dump();
        out.flush();
        if (!out) throw IOError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IOError("cannot move model into place at " + path + ": " + ec.message());
    }
}

FittedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("no such file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw IntegrityError("model file " + path + " is corrupt or truncated: " + e.what());
    }
    try {
        if (!root.is_object() || root.value("format", "") != "selfrocket-model")
            throw IntegrityError("not a model file: " + path);
        const int version = root.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw IncompatibilityError("model file " + path + " has format version " + std::to_string(version) +
                                       ", this build supports version " + std::to_string(kModelFormatVersion));
        const std::string expect = root.at("checksum").get<std::string>();
        const json& payload = root.at("payload");
        if (fnv1a_hex(payload.dump()) != expect)
            throw IntegrityError("model file " + path + " failed its checksum");
        return model_from_payload(payload);
    } catch (const json::exception& e) {
        throw IntegrityError("model file " + path + " is malformed: " + e.what());
    }
}

} // namespace selfrocket
