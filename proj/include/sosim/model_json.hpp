#pragma once

#include "sosim/smart_object.hpp"

#include <nlohmann/json.hpp>

namespace sosim {

/// {action, n, m, c[], d[], weights[], threshold, scale_shift, Q, N}
template <typename Scalar>
nlohmann::json model_to_json(const std::string& action, const BasicNBModel<Scalar>& model, std::size_t window_slots) {
    auto to_array = [](const auto& v) {
        nlohmann::json a = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
        return a;
    };
    return {{"action", action},
            {"n", model.n},
            {"m", model.m},
            {"c", to_array(model.c)},
            {"d", to_array(model.d)},
            {"weights", to_array(model.weights)},
            {"threshold", model.threshold},
            {"scale_shift", model.scale_shift},
            {"Q", model.config.fixed_point_scale},
            {"N", window_slots}};
}

template <typename Scalar>
struct LoadedModel {
    std::string action;
    BasicNBModel<Scalar> model;
    std::size_t window_slots = 0;
};

/// Inverse of model_to_json. Laplace alpha and w_max come from `base`.
/// Throws InvalidConfig on inconsistent vector lengths or counts.
template <typename Scalar>
LoadedModel<Scalar> model_from_json(const nlohmann::json& j, NBConfig base = {}) {
    try {
        const auto c = j.at("c").get<std::vector<std::uint32_t>>();
        const auto d = j.at("d").get<std::vector<std::uint32_t>>();
        const auto w = j.at("weights").get<std::vector<Scalar>>();
        if (c.size() != w.size() || d.size() != w.size()) throw InvalidConfig("model vectors differ in length");
        base.fixed_point_scale = j.at("Q").get<std::int32_t>();
        LoadedModel<Scalar> out{j.at("action").get<std::string>(), BasicNBModel<Scalar>(w.size(), base),
                                j.at("N").get<std::size_t>()};
        auto& model = out.model;
        model.n = j.at("n").get<std::uint32_t>();
        model.m = j.at("m").get<std::uint32_t>();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (c[i] > model.n || d[i] > model.m) throw InvalidConfig("presence count exceeds snapshot count");
            model.c[static_cast<Eigen::Index>(i)] = c[i];
            model.d[static_cast<Eigen::Index>(i)] = d[i];
            model.weights[static_cast<Eigen::Index>(i)] = w[i];
        }
        model.threshold = j.at("threshold").get<Scalar>();
        model.scale_shift = j.at("scale_shift").get<int>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("model document: ") + e.what());
    }
}

}  // namespace sosim
