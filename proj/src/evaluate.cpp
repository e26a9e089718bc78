#include "sparseanom/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sparseanom/binary_io.hpp"
#include "sparseanom/error.hpp"

namespace sparseanom {
namespace {

constexpr std::string_view kMaskMagic = "SAMSK001";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<RocPoint> with_endpoints(std::vector<RocPoint> points) {
  if (points.size() < 2) throw Error(ErrorCode::invalid_argument, "ROC needs at least two points");
  if (points.front().fpr != 0.0 || points.front().tpr != 0.0) points.insert(points.begin(), {kInf, 0.0, 0.0});
  if (points.back().fpr != 1.0 || points.back().tpr != 1.0) points.push_back({-kInf, 1.0, 1.0});
  return points;
}

double gap(const RocPoint& p) { return p.fpr - (1.0 - p.tpr); }

// Required covered pixels for the overlap rule; small slack absorbs the
// binary representation of fractions such as 0.4.
std::size_t required_pixels(std::size_t truth, double overlap) {
  return static_cast<std::size_t>(std::ceil(overlap * static_cast<double>(truth) - 1e-9));
}

std::size_t count_positive(const std::map<std::uint32_t, bool>& labels) {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](const auto& kv) { return kv.second; }));
}

void finish_report(EvalReport& report) {
  report.auc = auc(report.roc);
  report.equal_point = equal_error_point(report.roc);
  report.eer = report.equal_point.fpr;
  if (report.level == EvalLevel::pixel) report.edr = report.equal_point.tpr;
}

}  // namespace

std::size_t FrameMask::count() const {
  return static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), std::uint8_t{1}));
}

void save_masks(const MaskSet& masks, const std::filesystem::path& path) {
  io::Writer w;
  w.magic(kMaskMagic);
  w.u32(static_cast<std::uint32_t>(masks.frames.size()));
  w.u32(masks.height);
  w.u32(masks.width);
  const std::size_t area = static_cast<std::size_t>(masks.height) * masks.width;
  for (const FrameMask& m : masks.frames) {
    if (m.pixels.size() != area) throw Error(ErrorCode::dimension_mismatch, "mask size differs from clip size");
    std::vector<std::uint32_t> runs;
    std::uint8_t value = 0;
    std::uint32_t run = 0;
    for (std::uint8_t px : m.pixels) {
      const std::uint8_t bit = px ? 1 : 0;
      if (bit != value) {
        runs.push_back(run);
        run = 0;
        value = bit;
      }
      ++run;
    }
    runs.push_back(run);
    w.u32(static_cast<std::uint32_t>(runs.size()));
    for (std::uint32_t r : runs) w.u32(r);
  }
  io::write_file(path, w.bytes());
}

MaskSet load_masks(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::Reader r(bytes, path.string());
  r.expect_magic(kMaskMagic);
  MaskSet masks;
  const std::uint32_t t = r.u32();
  masks.height = r.u32();
  masks.width = r.u32();
  const std::size_t area = static_cast<std::size_t>(masks.height) * masks.width;
  masks.frames.resize(t);
  for (std::uint32_t f = 0; f < t; ++f) {
    FrameMask& m = masks.frames[f];
    m.height = masks.height;
    m.width = masks.width;
    m.pixels.reserve(area);
    const std::uint32_t nruns = r.u32();
    r.require(static_cast<std::size_t>(nruns) * 4, "mask runs");
    std::uint8_t value = 0;
    for (std::uint32_t k = 0; k < nruns; ++k) {
      const std::uint32_t len = r.u32();
      if (m.pixels.size() + len > area) throw Error(ErrorCode::malformed, path.string() + ": mask runs overflow frame");
      m.pixels.insert(m.pixels.end(), len, value);
      value ^= 1;
    }
    if (m.pixels.size() != area) throw Error(ErrorCode::malformed, path.string() + ": mask runs do not fill frame");
  }
  if (r.remaining() != 0) throw Error(ErrorCode::malformed, path.string() + ": trailing bytes");
  return masks;
}

GroundTruth GroundTruth::from_masks(const MaskSet& masks) {
  GroundTruth gt;
  for (std::size_t f = 0; f < masks.frames.size(); ++f) {
    const auto idx = static_cast<std::uint32_t>(f);
    gt.frame_labels[idx] = !masks.frames[f].empty();
    gt.pixel_masks[idx] = masks.frames[f];
  }
  return gt;
}

GroundTruth parse_labels_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  GroundTruth gt;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("frame", 0) == 0)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::malformed, source + ": bad row at line " + std::to_string(lineno));
    const std::string label = line.substr(comma + 1);
    bool abnormal;
    if (label == "1" || label == "abnormal") abnormal = true;
    else if (label == "0" || label == "normal") abnormal = false;
    else throw Error(ErrorCode::malformed, source + ": bad label '" + label + "' at line " + std::to_string(lineno));
    try {
      gt.frame_labels[static_cast<std::uint32_t>(std::stoul(line.substr(0, comma)))] = abnormal;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::malformed, source + ": bad frame index at line " + std::to_string(lineno));
    }
  }
  return gt;
}

double auc(std::vector<RocPoint> points) {
  points = with_endpoints(std::move(points));
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * 0.5 * (points[i].tpr + points[i - 1].tpr);
  }
  return area;
}

EqualPoint equal_error_point(std::vector<RocPoint> points) {
  points = with_endpoints(std::move(points));
  for (std::size_t i = 1; i < points.size(); ++i) {
    const RocPoint& a = points[i - 1];
    const RocPoint& b = points[i];
    const double ga = gap(a), gb = gap(b);
    if (ga == 0.0) return {a.fpr, a.tpr};
    if (ga < 0.0 && gb >= 0.0) {
      const double s = -ga / (gb - ga);
      return {a.fpr + s * (b.fpr - a.fpr), a.tpr + s * (b.tpr - a.tpr)};
    }
  }
  // (1,1) has gap +1 and (0,0) gap -1, so a crossing always exists.
  return {points.back().fpr, points.back().tpr};
}

double eer(std::vector<RocPoint> points) { return equal_error_point(std::move(points)).fpr; }

EvalReport roc_frame(const ScoreSet& scores, const GroundTruth& truth) {
  std::vector<std::uint32_t> missing;
  std::vector<std::pair<double, bool>> rows;
  for (const auto& [frame, abnormal] : truth.frame_labels) {
    const auto it = scores.per_frame.find(frame);
    if (it == scores.per_frame.end()) {
      missing.push_back(frame);
      continue;
    }
    rows.emplace_back(it->second, abnormal);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? "," : "") + std::to_string(missing[i]);
    if (missing.size() > 20) list += ",...";
    throw Error(ErrorCode::missing_requirement,
                "missing scores for " + std::to_string(missing.size()) + " labeled frames: " + list);
  }
  const std::size_t pos = count_positive(truth.frame_labels);
  const std::size_t neg = rows.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorCode::invalid_argument, "ROC needs both normal and abnormal frames");

  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  EvalReport report;
  report.level = EvalLevel::frame;
  report.roc.push_back({kInf, 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < rows.size();) {
    const double threshold = rows[i].first;
    for (; i < rows.size() && rows[i].first == threshold; ++i) (rows[i].second ? tp : fp)++;
    report.roc.push_back({threshold, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  report.roc = with_endpoints(std::move(report.roc));
  finish_report(report);
  return report;
}

EvalReport roc_pixel(const ScoreSet& scores, const GroundTruth& truth, double overlap) {
  if (!truth.has_masks()) throw Error(ErrorCode::missing_requirement, "pixel-level evaluation requires masks");
  if (!(overlap > 0.0 && overlap <= 1.0)) throw Error(ErrorCode::invalid_argument, "overlap must be in (0, 1]");
  if (scores.per_feature.size() != scores.provenance.size()) {
    throw Error(ErrorCode::dimension_mismatch, "score count differs from provenance count");
  }

  struct AbnormalFrame {
    const FrameMask* mask;
    std::vector<std::uint8_t> covered;
    std::size_t hits = 0, need = 0;
    bool detected = false;
  };
  std::map<std::uint32_t, AbnormalFrame> abnormal;
  std::map<std::uint32_t, bool> normal;  // value = already a false positive
  for (const auto& [frame, is_abnormal] : truth.frame_labels) {
    if (!is_abnormal) {
      normal[frame] = false;
      continue;
    }
    const auto it = truth.pixel_masks.find(frame);
    if (it == truth.pixel_masks.end() || it->second.empty()) {
      throw Error(ErrorCode::missing_requirement, "abnormal frame " + std::to_string(frame) + " has no mask");
    }
    AbnormalFrame a;
    a.mask = &it->second;
    a.covered.assign(it->second.pixels.size(), 0);
    a.need = std::max<std::size_t>(1, required_pixels(it->second.count(), overlap));
    abnormal.emplace(frame, std::move(a));
  }
  const std::size_t pos = abnormal.size();
  const std::size_t neg = normal.size();
  if (pos == 0 || neg == 0) throw Error(ErrorCode::invalid_argument, "ROC needs both normal and abnormal frames");

  std::vector<std::size_t> order(scores.per_feature.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores.per_feature[a] > scores.per_feature[b]; });

  EvalReport report;
  report.level = EvalLevel::pixel;
  report.roc.push_back({kInf, 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores.per_feature[order[i]];
    for (; i < order.size() && scores.per_feature[order[i]] == threshold; ++i) {
      const Provenance& prov = scores.provenance[order[i]];
      for (std::uint32_t k = 0; k < scores.frame_span; ++k) {
        const std::uint32_t frame = prov.frame_index + k;
        if (auto n = normal.find(frame); n != normal.end()) {
          if (!n->second) {
            n->second = true;
            ++fp;
          }
          continue;
        }
        auto a = abnormal.find(frame);
        if (a == abnormal.end()) continue;
        AbnormalFrame& af = a->second;
        const FrameMask& mask = *af.mask;
        const std::uint32_t y1 = std::min(prov.rect.y + prov.rect.h, mask.height);
        const std::uint32_t x1 = std::min(prov.rect.x + prov.rect.w, mask.width);
        for (std::uint32_t y = prov.rect.y; y < y1; ++y) {
          for (std::uint32_t x = prov.rect.x; x < x1; ++x) {
            const std::size_t px = static_cast<std::size_t>(y) * mask.width + x;
            if (!af.covered[px]) {
              af.covered[px] = 1;
              if (mask.pixels[px]) ++af.hits;
            }
          }
        }
        if (!af.detected && af.hits >= af.need) {
          af.detected = true;
          ++tp;
        }
      }
    }
    report.roc.push_back({threshold, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  report.roc = with_endpoints(std::move(report.roc));
  finish_report(report);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::json;
  auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json roc = json::array();
  for (const RocPoint& p : report.roc) roc.push_back({{"threshold", number(p.threshold)}, {"fpr", p.fpr}, {"tpr", p.tpr}});
  json out;
  out["level"] = report.level == EvalLevel::frame ? "frame" : "pixel";
  out["auc"] = report.auc;
  out["eer"] = report.eer;
  out["edr"] = report.edr ? json(*report.edr) : json(nullptr);
  out["equal_point"] = {{"fpr", report.equal_point.fpr}, {"tpr", report.equal_point.tpr}};
  out["roc"] = std::move(roc);
  return out.dump(2) + "\n";
}

std::string roc_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (const RocPoint& p : report.roc) {
    out << io::format_double(p.threshold) << ',' << io::format_double(p.fpr) << ',' << io::format_double(p.tpr) << '\n';
  }
  return out.str();
}

}  // namespace sparseanom
