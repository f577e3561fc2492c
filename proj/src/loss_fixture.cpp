#include "roadnet/loss_fixture.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "roadnet/error.hpp"
#include "roadnet/loss.hpp"

namespace roadnet {

using nlohmann::json;

namespace {

Vec2 as_vec(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected [x, y], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

AdjacencyEntry as_entry(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected [dx, dy, p], got " + j.dump());
  return {{j[0].get<double>(), j[1].get<double>()}, j[2].get<double>()};
}

std::vector<AdjacencyEntry> as_entries(const json& j) {
  std::vector<AdjacencyEntry> out;
  for (const auto& e : j) out.push_back(as_entry(e));
  return out;
}

ChannelValues as_channels(const json& j) {
  ChannelValues out;
  const char* names[] = {"keypoint", "sampling", "road"};
  for (int c = 0; c < 3; ++c) {
    if (!j.contains(names[c])) throw ParseError(std::string("maps need a \"") + names[c] + "\" channel");
    out[c] = j[names[c]].get<std::vector<double>>();
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool LossCheckReport::all_ok() const {
  for (const auto& c : cases)
    if (!c.ok) return false;
  return true;
}

std::string LossCheckReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : cases) {
    os << (c.ok ? "ok   " : "FAIL ") << c.name << " [" << c.op << "] = " << fmt(c.value);
    if (c.expected) os << " (expected " << fmt(*c.expected) << ")";
    os << '\n';
    for (const auto& [k, v] : c.details) os << "       " << k << " = " << fmt(v) << '\n';
  }
  return os.str();
}

LossCheckReport run_losscheck(std::string_view json_text, double rel_tol) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed loss fixture: ") + e.what(), {}, e.byte);
  }
  LossWeights weights;
  if (doc.contains("weights")) {
    const auto& w = doc["weights"];
    weights.seg = w.value("seg", weights.seg);
    weights.cls = w.value("cls", weights.cls);
    weights.coord = w.value("coord", weights.coord);
  }
  weights.validate();
  if (!doc.contains("cases") || !doc["cases"].is_array()) throw ParseError("loss fixture needs a \"cases\" array");

  LossCheckReport report;
  for (std::size_t k = 0; k < doc["cases"].size(); ++k) {
    const auto& c = doc["cases"][k];
    LossCheckCase out;
    out.op = c.value("op", "");
    out.name = c.value("name", "case " + std::to_string(k));
    try {
      if (out.op == "match_cost") {
        out.value = match_cost(as_entry(c.at("pred")), as_vec(c.at("gt")), weights);
      } else if (out.op == "coord_loss") {
        std::vector<std::pair<Vec2, Vec2>> pairs;
        for (const auto& p : c.at("pairs")) pairs.emplace_back(as_vec(p.at(0)), as_vec(p.at(1)));
        out.value = coord_loss(pairs);
      } else if (out.op == "class_loss") {
        const auto preds = as_entries(c.at("predictions"));
        const auto matched = c.at("matched").get<std::vector<bool>>();
        out.value = class_loss(preds, matched);
      } else if (out.op == "seg_loss") {
        out.value = seg_loss(as_channels(c.at("pred_maps")), as_channels(c.at("gt_maps")));
      } else if (out.op == "total_loss") {
        const auto comp = c.at("components").get<std::vector<double>>();
        if (comp.size() != 3) throw ParseError("total_loss needs [seg, cls, coord]");
        out.value = total_loss({comp[0], comp[1], comp[2]}, weights);
      } else if (out.op == "sample") {
        const auto preds = as_entries(c.at("predictions"));
        std::vector<Vec2> gt;
        for (const auto& g : c.at("gt_neighbors")) gt.push_back(as_vec(g));
        SampleLoss s = evaluate_sample(preds, gt, weights);
        if (c.contains("pred_maps")) s.components.seg = seg_loss(as_channels(c["pred_maps"]), as_channels(c["gt_maps"]));
        out.value = total_loss(s.components, weights);
        out.details = {{"seg", s.components.seg},
                       {"class", s.components.cls},
                       {"coord", s.components.coord},
                       {"assignment_cost", s.assignment.total_cost}};
        for (std::size_t j = 0; j < s.assignment.gt_to_pred.size(); ++j)
          out.details.emplace_back("gt" + std::to_string(j) + "->pred", static_cast<double>(s.assignment.gt_to_pred[j]));
      } else {
        throw ParseError("unknown loss op '" + out.op + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("case '" + out.name + "': " + e.what());
    }
    if (c.contains("expected")) {
      out.expected = c["expected"].get<double>();
      out.ok = std::abs(out.value - *out.expected) <= rel_tol * std::max(1.0, std::abs(*out.expected));
    }
    report.cases.push_back(std::move(out));
  }
  return report;
}

}  // namespace roadnet
