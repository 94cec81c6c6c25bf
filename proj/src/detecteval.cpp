#include "vqad/detecteval.hpp"

#include <algorithm>
#include <tuple>

#include "vqad/errors.hpp"
#include "vqad/parallel.hpp"

namespace vqad {

double iou(const BoxI& a, const BoxI& b) {
    const int ix0 = std::max(a.x, b.x);
    const int iy0 = std::max(a.y, b.y);
    const int ix1 = std::min(a.x + a.w, b.x + b.w);
    const int iy1 = std::min(a.y + a.h, b.y + b.h);
    const long iw = std::max(0, ix1 - ix0);
    const long ih = std::max(0, iy1 - iy0);
    const long inter = iw * ih;
    const long uni = static_cast<long>(a.w) * a.h + static_cast<long>(b.w) * b.h - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<DetectionBox> extract_boxes(const BinaryMask& amap, const MapF& sm, int min_area,
                                        Connectivity conn) {
    if (amap.h != sm.h || amap.w != sm.w) throw ShapeError("extract_boxes: shape mismatch");
    const ComponentSet cs = label_components(amap, conn);
    std::vector<DetectionBox> boxes;
    for (const Component& c : cs.comps) {
        if (c.area < min_area) continue;
        double acc = 0;
        for (int p : c.pixels) acc += sm.v[static_cast<std::size_t>(p)];
        boxes.push_back({c.min_x, c.min_y, c.max_x - c.min_x + 1, c.max_y - c.min_y + 1,
                         static_cast<float>(acc / static_cast<double>(c.area))});
    }
    return boxes;
}

namespace {

std::tuple<int, int, int, int, float> pred_key(const DetectionBox& b) {
    return {b.x, b.y, b.w, b.h, b.score};
}
std::tuple<int, int, int, int> gt_key(const BoxI& b) { return {b.x, b.y, b.w, b.h}; }

}  // namespace

MatchResult match_detections(const std::vector<DetectionBox>& pred, const std::vector<BoxI>& gt,
                             double iou_threshold) {
    struct Cand {
        double iou;
        int pi, gi;
    };
    std::vector<Cand> cands;
    for (int pi = 0; pi < static_cast<int>(pred.size()); ++pi)
        for (int gi = 0; gi < static_cast<int>(gt.size()); ++gi) {
            const double v = iou(pred[static_cast<std::size_t>(pi)].geom(),
                                 gt[static_cast<std::size_t>(gi)]);
            if (v >= iou_threshold && v > 0) cands.push_back({v, pi, gi});
        }
    // Content-based tie order keeps the counts permutation-invariant.
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        const auto pa = pred_key(pred[static_cast<std::size_t>(a.pi)]);
        const auto pb = pred_key(pred[static_cast<std::size_t>(b.pi)]);
        if (pa != pb) return pa < pb;
        return gt_key(gt[static_cast<std::size_t>(a.gi)]) <
               gt_key(gt[static_cast<std::size_t>(b.gi)]);
    });

    MatchResult r;
    std::vector<std::uint8_t> pred_used(pred.size(), 0), gt_used(gt.size(), 0);
    for (const Cand& c : cands) {
        if (pred_used[static_cast<std::size_t>(c.pi)] || gt_used[static_cast<std::size_t>(c.gi)])
            continue;
        pred_used[static_cast<std::size_t>(c.pi)] = 1;
        gt_used[static_cast<std::size_t>(c.gi)] = 1;
        r.pairs.push_back({c.pi, c.gi, c.iou});
    }
    r.tp = static_cast<long>(r.pairs.size());
    r.fp = static_cast<long>(pred.size()) - r.tp;
    r.fn = static_cast<long>(gt.size()) - r.tp;
    return r;
}

double f1_score(double precision, double recall) {
    const double s = precision + recall;
    return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

EvalReport score(long tp, long fp, long fn) {
    EvalReport r;
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

SweepResult sweep_over_maps(const std::vector<TileEval>& tiles,
                            const std::vector<float>& grid_sm,
                            const std::vector<float>& grid_am, const SweepOptions& opt) {
    if (tiles.empty()) throw ConfigError("sweep: empty validation set");
    if (grid_sm.empty() || grid_am.empty()) throw ConfigError("sweep: empty threshold grid");

    struct Cell {
        long tp = 0, fp = 0, fn = 0;
    };
    const int n_pairs = static_cast<int>(grid_sm.size() * grid_am.size());
    std::vector<Cell> cells(static_cast<std::size_t>(n_pairs));
    parallel_for(n_pairs, [&](int pi) {
        const float lsm = grid_sm[static_cast<std::size_t>(pi) / grid_am.size()];
        const float lam = grid_am[static_cast<std::size_t>(pi) % grid_am.size()];
        Cell& cell = cells[static_cast<std::size_t>(pi)];
        for (const TileEval& t : tiles) {
            const BinaryMask amap = hysteresis_select(t.sm, t.am, lsm, lam, opt.connectivity);
            const auto boxes = extract_boxes(amap, t.sm, opt.min_area, opt.connectivity);
            const MatchResult m = match_detections(boxes, t.gt, opt.iou_threshold);
            cell.tp += m.tp;
            cell.fp += m.fp;
            cell.fn += m.fn;
        }
    });

    SweepResult best;
    bool have = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const float lsm = grid_sm[i / grid_am.size()];
        const float lam = grid_am[i % grid_am.size()];
        const EvalReport rep = score(cells[i].tp, cells[i].fp, cells[i].fn);
        const bool better =
            !have || rep.f1 > best.report.f1 ||
            (rep.f1 == best.report.f1 &&
             (rep.precision > best.report.precision ||
              (rep.precision == best.report.precision &&
               (lsm < best.lambda_sm || (lsm == best.lambda_sm && lam < best.lambda_am)))));
        if (better) {
            best = {lsm, lam, rep, cells[i].tp, cells[i].fp, cells[i].fn};
            have = true;
        }
    }
    return best;
}

}  // namespace vqad
