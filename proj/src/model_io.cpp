#include "iotids/model_io.hpp"

#include <fstream>
#include <sstream>

#include "iotids/errors.hpp"
#include "json_util.hpp"

namespace iotids {

namespace {

using detail::json;

constexpr int kFormatVersion = 1;

json spec_to_json(const ModelSpec& spec) {
    json j;
    j["kind"] = spec.name();
    switch (spec.kind) {
        case ModelSpec::Kind::RandomForest:
            j["n_estimators"] = spec.rf.n_estimators;
            j["max_depth"] = spec.rf.max_depth;
            j["min_samples_split"] = spec.rf.min_samples_split;
            j["min_samples_leaf"] = spec.rf.min_samples_leaf;
            j["seed"] = spec.rf.seed;
            break;
        case ModelSpec::Kind::Knn:
            j["k"] = spec.knn.k;
            break;
        case ModelSpec::Kind::LogReg:
            j["l2"] = spec.logreg.l2;
            j["lr"] = spec.logreg.lr;
            j["max_iter"] = spec.logreg.max_iter;
            j["tol"] = spec.logreg.tol;
            break;
        case ModelSpec::Kind::Mlp:
            j["hidden"] = spec.mlp.hidden;
            j["lr"] = spec.mlp.lr;
            j["momentum"] = spec.mlp.momentum;
            j["batch"] = spec.mlp.batch;
            j["max_epochs"] = spec.mlp.max_epochs;
            j["patience"] = spec.mlp.patience;
            break;
        case ModelSpec::Kind::SoftVoting: {
            json members = json::array();
            for (const auto& m : spec.members) members.push_back(spec_to_json(m));
            j["members"] = std::move(members);
            break;
        }
    }
    return j;
}

ModelSpec spec_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rf") {
        RfHyperParams p;
        p.n_estimators = j.at("n_estimators").get<int>();
        p.max_depth = j.at("max_depth").get<int>();
        p.min_samples_split = j.at("min_samples_split").get<int>();
        p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        return ModelSpec::random_forest(p);
    }
    if (kind == "knn") return ModelSpec::knn_spec(j.at("k").get<int>());
    if (kind == "logreg") {
        LogRegParams p;
        p.l2 = j.at("l2").get<double>();
        p.lr = j.at("lr").get<double>();
        p.max_iter = j.at("max_iter").get<int>();
        p.tol = j.at("tol").get<double>();
        return ModelSpec::logreg_spec(p);
    }
    if (kind == "mlp") {
        MlpParams p;
        p.hidden = j.at("hidden").get<int>();
        p.lr = j.at("lr").get<double>();
        p.momentum = j.at("momentum").get<double>();
        p.batch = j.at("batch").get<int>();
        p.max_epochs = j.at("max_epochs").get<int>();
        p.patience = j.at("patience").get<int>();
        return ModelSpec::mlp_spec(p);
    }
    if (kind == "voting") {
        std::vector<ModelSpec> members;
        for (const auto& m : j.at("members")) members.push_back(spec_from_json(m));
        return ModelSpec::soft_voting(std::move(members));
    }
    throw DataError("unknown model kind '" + kind + "' in model file");
}

json tree_to_json(const DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& nd : tree.nodes) {
        json n;
        n["f"] = nd.feature;
        if (nd.feature >= 0) {
            n["t"] = nd.threshold;
            n["l"] = nd.left;
            n["r"] = nd.right;
        } else {
            n["c"] = detail::vector_to_json(nd.class_counts);
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

DecisionTree tree_from_json(const json& j, int n_classes) {
    DecisionTree tree;
    tree.n_classes = n_classes;
    for (const auto& n : j) {
        TreeNode nd;
        nd.feature = n.at("f").get<int>();
        if (nd.feature >= 0) {
            nd.threshold = n.at("t").get<double>();
            nd.left = n.at("l").get<int>();
            nd.right = n.at("r").get<int>();
        } else {
            nd.class_counts = detail::vector_from_json(n.at("c"));
        }
        tree.nodes.push_back(std::move(nd));
    }
    return tree;
}

json model_payload(const TrainedModel& m);

json impl_to_json(const TrainedModel& m) {
    json j;
    switch (m.spec.kind) {
        case ModelSpec::Kind::RandomForest: {
            const auto& rf = dynamic_cast<const RandomForestModel&>(*m.impl);
            json trees = json::array();
            for (const auto& t : rf.trees) trees.push_back(tree_to_json(t));
            j["trees"] = std::move(trees);
            j["feature_importance"] = detail::vector_to_json(rf.feature_importance);
            break;
        }
        case ModelSpec::Kind::Knn: {
            const auto& knn = dynamic_cast<const KnnModel&>(*m.impl);
            j["train_X"] = detail::matrix_to_json(knn.train_X);
            j["train_y"] = detail::ivector_to_json(knn.train_y);
            break;
        }
        case ModelSpec::Kind::LogReg: {
            const auto& lr = dynamic_cast<const LogRegModel&>(*m.impl);
            j["weights"] = detail::matrix_to_json(lr.weights);
            j["bias"] = detail::vector_to_json(lr.bias.transpose());
            break;
        }
        case ModelSpec::Kind::Mlp: {
            const auto& mlp = dynamic_cast<const MlpModel&>(*m.impl);
            j["w1"] = detail::matrix_to_json(mlp.w1);
            j["b1"] = detail::vector_to_json(mlp.b1.transpose());
            j["w2"] = detail::matrix_to_json(mlp.w2);
            j["b2"] = detail::vector_to_json(mlp.b2.transpose());
            break;
        }
        case ModelSpec::Kind::SoftVoting: {
            const auto& voting = dynamic_cast<const VotingModel&>(*m.impl);
            json members = json::array();
            for (const auto& member : voting.members) members.push_back(model_payload(member));
            j["members"] = std::move(members);
            break;
        }
    }
    return j;
}

json model_payload(const TrainedModel& m) {
    json j;
    j["spec"] = spec_to_json(m.spec);
    j["n_classes"] = m.n_classes;
    j["expected_features"] = m.expected_features;
    j["class_names"] = m.class_names;
    j["state"] = impl_to_json(m);
    return j;
}

TrainedModel model_from_payload(const json& j) {
    TrainedModel m;
    m.spec = spec_from_json(j.at("spec"));
    m.n_classes = j.at("n_classes").get<int>();
    m.expected_features = j.at("expected_features").get<std::vector<std::string>>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();

    const json& state = j.at("state");
    switch (m.spec.kind) {
        case ModelSpec::Kind::RandomForest: {
            auto rf = std::make_shared<RandomForestModel>();
            rf->params = m.spec.rf;
            rf->n_classes = m.n_classes;
            for (const auto& t : state.at("trees"))
                rf->trees.push_back(tree_from_json(t, m.n_classes));
            rf->feature_importance = detail::vector_from_json(state.at("feature_importance"));
            m.impl = rf;
            break;
        }
        case ModelSpec::Kind::Knn: {
            auto knn = std::make_shared<KnnModel>();
            knn->k = m.spec.knn.k;
            knn->train_X = detail::matrix_from_json(
                state.at("train_X"), static_cast<Eigen::Index>(m.expected_features.size()));
            knn->train_y = detail::ivector_from_json(state.at("train_y"));
            knn->n_classes = m.n_classes;
            m.impl = knn;
            break;
        }
        case ModelSpec::Kind::LogReg: {
            auto lr = std::make_shared<LogRegModel>();
            lr->weights = detail::matrix_from_json(state.at("weights"));
            lr->bias = detail::vector_from_json(state.at("bias")).transpose();
            m.impl = lr;
            break;
        }
        case ModelSpec::Kind::Mlp: {
            auto mlp = std::make_shared<MlpModel>();
            mlp->w1 = detail::matrix_from_json(state.at("w1"));
            mlp->b1 = detail::vector_from_json(state.at("b1")).transpose();
            mlp->w2 = detail::matrix_from_json(state.at("w2"));
            mlp->b2 = detail::vector_from_json(state.at("b2")).transpose();
            m.impl = mlp;
            break;
        }
        case ModelSpec::Kind::SoftVoting: {
            auto voting = std::make_shared<VotingModel>();
            for (const auto& member : state.at("members"))
                voting->members.push_back(model_from_payload(member));
            m.impl = voting;
            break;
        }
    }
    return m;
}

}  // namespace

std::string model_to_json_string(const TrainedModel& m) {
    if (!m.impl) throw DataError("cannot save an unfitted model");
    json doc;
    doc["format"] = "iotids-model";
    doc["version"] = kFormatVersion;
    json payload = model_payload(m);
    char checksum[32];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(payload.dump())));
    doc["checksum"] = checksum;
    doc["payload"] = std::move(payload);
    return doc.dump();
}

TrainedModel model_from_json_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("corrupt model file: ") + e.what());
    }
    if (!doc.contains("format") || doc["format"] != "iotids-model")
        throw DataError("not a model file");
    if (doc.at("version").get<int>() != kFormatVersion)
        throw DataError("unsupported model file version " +
                        std::to_string(doc.at("version").get<int>()));

    const json& payload = doc.at("payload");
    char expected[32];
    std::snprintf(expected, sizeof expected, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(payload.dump())));
    if (doc.at("checksum").get<std::string>() != expected)
        throw DataError("model file checksum mismatch (file is corrupt or truncated)");

    return model_from_payload(payload);
}

void save_model(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << model_to_json_string(m) << '\n';
    if (!out) throw DataError("error writing model file: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json_string(ss.str());
}

}  // namespace iotids
