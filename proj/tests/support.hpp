#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "geoscout/batch.hpp"
#include "geoscout/catalog.hpp"
#include "geoscout/grpo.hpp"
#include "geoscout/image.hpp"
#include "json.hpp"

namespace testsupport {

inline geoscout::ImageBuffer random_image(int w, int h, int channels, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * channels);
  for (auto& p : px) p = static_cast<std::uint8_t>(gen() & 0xff);
  return geoscout::ImageBuffer(w, h, channels, std::move(px));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("geoscout-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

// Writes a small catalog: `per_modality` CT slices in one series, the same
// for MRI, and X-rays with embeddings. Returns the catalog path.
struct FixtureCatalog {
  std::filesystem::path catalog;
  std::filesystem::path embeddings;
};

inline FixtureCatalog write_fixture_catalog(const std::filesystem::path& dir, int per_modality, int size = 64,
                                            std::uint64_t seed = 1) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "src");
  std::ofstream cat(dir / "catalog.jsonl");
  std::ofstream emb(dir / "embeddings.jsonl");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  for (const char* m : {"ct", "mri"}) {
    for (int z = 0; z < per_modality; ++z) {
      const std::string id = std::string(m) + "-s" + std::to_string(z);
      const std::string rel = "src/" + id + ".png";
      geoscout::write_png(dir / rel, random_image(size, size, 1, gen()));
      nlohmann::ordered_json j{{"id", id}, {"modality", m}, {"path", rel}, {"series_id", std::string(m) + "-series"},
                               {"z", z}};
      cat << j.dump() << "\n";
    }
  }
  for (int i = 0; i < per_modality; ++i) {
    const std::string id = "xr-" + std::to_string(i);
    const std::string rel = "src/" + id + ".png";
    geoscout::write_png(dir / rel, random_image(size, size, 1, gen()));
    nlohmann::ordered_json j{{"id", id}, {"modality", "xray"}, {"path", rel}, {"embedding_id", id}};
    cat << j.dump() << "\n";
    std::vector<double> v(8);
    for (auto& x : v) x = nd(gen);
    emb << nlohmann::ordered_json{{"id", id}, {"vector", v}}.dump() << "\n";
  }
  return {dir / "catalog.jsonl", dir / "embeddings.jsonl"};
}

// Mixed scoring items: all three kinds, both modes, outputs ranging from exact
// answers through perturbed ones to junk.
inline std::vector<geoscout::RewardItem> random_reward_items(std::size_t n, std::uint64_t seed) {
  using namespace geoscout;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 1);
  auto box = [&] {
    const double x = u(gen) * 0.6, y = u(gen) * 0.6;
    return BBox(x, y, x + 0.05 + u(gen) * 0.3, y + 0.05 + u(gen) * 0.3);
  };
  std::vector<RewardItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mode mode = gen() % 2 ? Mode::Reasoning : Mode::Direct;
    GroundTruth gt;
    std::string answer;
    switch (i % 3) {
      case 0: {
        ScaleTruth t;
        std::vector<int> lv;
        std::vector<RawBox> bx;
        for (int k = 0; k < 3; ++k) {
          t.levels.push_back(1 + static_cast<int>(gen() % 3));
          t.boxes.push_back(box());
          lv.push_back(gen() % 4 ? t.levels.back() : 1 + static_cast<int>(gen() % 3));
          bx.push_back(gen() % 3 ? canonical_box(t.boxes.back()) : box().raw());
        }
        answer = format_scale_answer(lv, bx);
        gt = std::move(t);
        break;
      }
      case 1: {
        const GridSpec g = gen() % 2 ? GridSpec(2, 2) : GridSpec(3, 3);
        std::vector<int> p(static_cast<std::size_t>(g.cells()));
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<int>(k);
        std::shuffle(p.begin(), p.end(), gen);
        gt = TopoTruth{Permutation(p), g};
        if (gen() % 2) std::shuffle(p.begin(), p.end(), gen);
        answer = format_order_answer(p);
        break;
      }
      default: {
        const GridSpec g(4, 4);
        gt = AnomTruth{static_cast<int>(gen() % 16), g};
        answer = format_index_answer(static_cast<int>(gen() % 16));
      }
    }
    std::string out;
    switch (gen() % 5) {
      case 0: out = canonical_response(gt, mode); break;
      case 1: out = "no idea"; break;
      case 2: out = "<think>looking at the tiles</think><answer>" + answer + "</answer>"; break;
      default: out = "<answer>" + answer + "</answer>";
    }
    items.push_back({std::move(gt), mode, std::move(out)});
  }
  return items;
}

// Random 5-action surrogate instance whose ratios stay clear of the clip kinks.
struct SurrogateInstance {
  std::vector<double> logits;
  geoscout::Group group;
  std::vector<double> ref;
  double beta;
};

inline SurrogateInstance random_surrogate_instance(std::mt19937_64& gen, double clip) {
  using namespace geoscout;
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0, 1);
  for (;;) {
    SurrogateInstance in;
    const std::size_t n = 5;
    std::vector<double> old(n), ref(n);
    for (auto& v : old) v = nd(gen);
    for (auto& v : ref) v = nd(gen);
    in.logits = old;
    for (auto& v : in.logits) v += 0.3 * nd(gen);
    in.group.old_probs = softmax(old);
    in.ref = softmax(ref);
    in.beta = 0.5 * u(gen);
    const int G = 2 + static_cast<int>(gen() % 7);
    std::vector<double> rewards;
    for (int i = 0; i < G; ++i) {
      in.group.actions.push_back(gen() % n);
      rewards.push_back(u(gen));
    }
    in.group.advantages = group_advantages(rewards, 1e-8);
    const auto p = softmax(in.logits);
    bool near_kink = false;
    for (auto a : in.group.actions) {
      const double rho = p[a] / in.group.old_probs[a];
      near_kink |= std::abs(rho - (1 + clip)) < 1e-3 || std::abs(rho - (1 - clip)) < 1e-3;
    }
    if (!near_kink) return in;
  }
}

// ||central difference - analytic|| / max(||analytic||, 1e-3), step h.
inline double surrogate_fd_error(const SurrogateInstance& in, double clip, double h = 1e-5) {
  using namespace geoscout;
  const auto g = grpo_surrogate_gradient(in.logits, in.group, in.ref, in.beta, clip);
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < in.logits.size(); ++k) {
    auto up = in.logits, dn = in.logits;
    up[k] += h;
    dn[k] -= h;
    const double fd =
        (grpo_surrogate(up, in.group, in.ref, in.beta, clip) - grpo_surrogate(dn, in.group, in.ref, in.beta, clip)) /
        (2 * h);
    diff += (fd - g[k]) * (fd - g[k]);
    norm += g[k] * g[k];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-3);
}

}  // namespace testsupport
