#include "view/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace view {

std::optional<double> DetectionFrame::depth_at(const PixelPoint& p) const {
  std::vector<double> nearby;
  for (const auto& s : depth) {
    if (std::abs(s.at.u - p.u) <= 1.5 && std::abs(s.at.v - p.v) <= 1.5) {
      if (s.meters > 0.0 && std::isfinite(s.meters)) nearby.push_back(s.meters);
    }
  }
  if (nearby.empty()) return std::nullopt;
  std::sort(nearby.begin(), nearby.end());
  const std::size_t n = nearby.size();
  return n % 2 == 1 ? nearby[n / 2] : 0.5 * (nearby[n / 2 - 1] + nearby[n / 2]);
}

Recording load_recording(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ViewError("cannot open recording: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);

  Recording rec;
  const auto& cam = doc.at("camera");
  rec.camera.fx = cam.at("fx").get<double>();
  rec.camera.fy = cam.at("fy").get<double>();
  rec.camera.cx = cam.at("cx").get<double>();
  rec.camera.cy = cam.at("cy").get<double>();
  const auto ext = cam.at("extrinsic").get<std::vector<double>>();
  if (ext.size() != 16) throw ViewError("extrinsic must hold 16 row-major floats");
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) rec.camera.extrinsic(r, c) = ext[r * 4 + c];
  }
  rec.camera.validate();

  for (const auto& jf : doc.at("frames")) {
    DetectionFrame frame;
    frame.t = jf.at("t").get<double>();
    frame.wrist = PixelPoint{jf.at("wrist").at(0).get<double>(),
                             jf.at("wrist").at(1).get<double>()};
    frame.contact = jf.at("contact").get<bool>();
    for (const auto& jd : jf.value("depth", nlohmann::json::array())) {
      frame.depth.push_back(DepthSample{
          PixelPoint{jd.at(0).get<double>(), jd.at(1).get<double>()},
          jd.at(2).get<double>()});
    }
    for (const auto& jd : jf.value("detections", nlohmann::json::array())) {
      Detection det;
      det.tag = jd.at("tag").get<std::string>();
      const auto bbox = jd.at("bbox").get<std::vector<double>>();
      if (bbox.size() != 4) throw ViewError("bbox must hold 4 coordinates");
      std::copy(bbox.begin(), bbox.end(), det.bbox.begin());
      det.centroid = PixelPoint{jd.at("centroid").at(0).get<double>(),
                                jd.at("centroid").at(1).get<double>()};
      frame.detections.push_back(std::move(det));
    }
    rec.frames.push_back(std::move(frame));
  }
  return rec;
}

void save_recording(const Recording& rec, const std::string& path) {
  nlohmann::json doc;
  std::vector<double> ext(16);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) ext[r * 4 + c] = rec.camera.extrinsic(r, c);
  }
  doc["camera"] = {{"fx", rec.camera.fx}, {"fy", rec.camera.fy},
                   {"cx", rec.camera.cx}, {"cy", rec.camera.cy},
                   {"extrinsic", ext}};
  doc["frames"] = nlohmann::json::array();
  for (const auto& f : rec.frames) {
    nlohmann::json jf;
    jf["t"] = f.t;
    jf["wrist"] = {f.wrist.u, f.wrist.v};
    jf["contact"] = f.contact;
    jf["depth"] = nlohmann::json::array();
    for (const auto& s : f.depth) jf["depth"].push_back({s.at.u, s.at.v, s.meters});
    jf["detections"] = nlohmann::json::array();
    for (const auto& d : f.detections) {
      jf["detections"].push_back(
          {{"tag", d.tag},
           {"bbox", {d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]}},
           {"centroid", {d.centroid.u, d.centroid.v}}});
    }
    doc["frames"].push_back(std::move(jf));
  }
  std::ofstream out(path);
  if (!out) throw ViewError("cannot write recording: " + path);
  out << doc.dump(2) << "\n";
}

Trajectory extract_hand_trajectory(const std::vector<DetectionFrame>& frames,
                                   const CameraModel& cam) {
  Trajectory out;
  out.kind = TrajKind::raw;
  for (const auto& f : frames) {
    const auto depth = f.depth_at(f.wrist);
    if (!depth) continue;
    out.waypoints.push_back(Waypoint{deproject(cam, f.wrist, *depth), f.contact, f.t});
  }
  if (out.waypoints.size() < 2) {
    throw TooFewFramesError("fewer than 2 frames with valid wrist depth");
  }
  return out;
}

namespace {

bool in_anchor_box(const PixelPoint& centroid, const PixelPoint& wrist, double side) {
  return std::abs(centroid.u - wrist.u) <= 0.5 * side &&
         std::abs(centroid.v - wrist.v) <= 0.5 * side;
}

}  // namespace

std::string vote_object_tag(const std::vector<DetectionFrame>& frames,
                            const std::vector<double>& anchor_scales) {
  std::map<std::string, int> counts;
  for (const auto& f : frames) {
    if (!f.contact) continue;
    for (double scale : anchor_scales) {
      const double side = scale * 64.0;
      for (const auto& det : f.detections) {
        if (in_anchor_box(det.centroid, f.wrist, side)) ++counts[det.tag];
      }
    }
  }
  if (counts.empty()) {
    throw NoCandidatesError("no detection falls in any anchor box");
  }
  auto best = counts.begin();
  for (auto it = std::next(counts.begin()); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it != best && it->second == best->second) {
      throw AmbiguousTagError("tag vote tied between '" + best->first + "' and '" +
                              it->first + "'");
    }
  }
  return best->first;
}

ObjectExtraction extract_object_track(const std::vector<DetectionFrame>& frames,
                                      const std::string& tag,
                                      const CameraModel& cam) {
  const int n = static_cast<int>(frames.size());
  std::vector<std::optional<PixelPoint>> px(n);
  std::vector<std::optional<Vec3>> p3(n);
  int present = 0;
  for (int i = 0; i < n; ++i) {
    for (const auto& det : frames[i].detections) {
      if (det.tag != tag) continue;
      px[i] = det.centroid;
      ++present;
      if (const auto depth = frames[i].depth_at(det.centroid)) {
        p3[i] = deproject(cam, det.centroid, *depth);
      }
      break;
    }
  }
  if (present < 2) throw TagAbsentError("tag '" + tag + "' seen in fewer than 2 frames");
  if (std::none_of(p3.begin(), p3.end(), [](const auto& s) { return s.has_value(); })) {
    throw BadDepthError("no depth sample near any '" + tag + "' detection");
  }

  // linear fill between detections, constant at the ends
  auto fill = [&](auto& slots, auto lerp) {
    int prev = -1;
    for (int i = 0; i < n; ++i) {
      if (!slots[i].has_value()) continue;
      if (prev < 0) {
        for (int k = 0; k < i; ++k) slots[k] = slots[i];
      } else {
        for (int k = prev + 1; k < i; ++k) {
          const double a = static_cast<double>(k - prev) / (i - prev);
          slots[k] = lerp(*slots[prev], *slots[i], a);
        }
      }
      prev = i;
    }
    for (int k = prev + 1; k < n; ++k) slots[k] = slots[prev];
  };
  fill(px, [](const PixelPoint& a, const PixelPoint& b, double t) {
    return PixelPoint{a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)};
  });
  fill(p3, [](const Vec3& a, const Vec3& b, double t) -> Vec3 {
    return a + t * (b - a);
  });

  ObjectExtraction out;
  out.track.tag = tag;
  for (int i = 0; i < n; ++i) {
    out.track.points.push_back(*px[i]);
    out.track_3d.push_back(Waypoint{*p3[i], frames[i].contact, frames[i].t});
  }
  return out;
}

}  // namespace view
