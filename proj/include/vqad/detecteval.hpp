#pragma once

#include <vector>

#include "vqad/fusion.hpp"
#include "vqad/tensor.hpp"

namespace vqad {

// Axis-aligned pixel rectangle, half-open in neither axis: covers
// [x, x+w-1] x [y, y+h-1].
struct BoxI {
    int x = 0, y = 0, w = 0, h = 0;
    bool operator==(const BoxI&) const = default;
};

struct DetectionBox {
    int x = 0, y = 0, w = 0, h = 0;
    float score = 0.0f;  // mean sm over the component's pixels
    BoxI geom() const { return {x, y, w, h}; }
};

double iou(const BoxI& a, const BoxI& b);

// One box per connected component of the binary map with at least min_area
// pixels; ordered by component id.
std::vector<DetectionBox> extract_boxes(const BinaryMask& amap, const MapF& sm, int min_area,
                                        Connectivity conn = Connectivity::eight);

struct MatchPair {
    int pred = 0, gt = 0;  // indices into the input lists
    double iou = 0.0;
};

struct MatchResult {
    long tp = 0, fp = 0, fn = 0;
    std::vector<MatchPair> pairs;

    void add_counts(const MatchResult& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
    }
};

// Greedy one-to-one matching in descending IoU; a pair counts iff
// IoU >= iou_threshold. Ties are ordered by box content so the counts do not
// depend on input order.
MatchResult match_detections(const std::vector<DetectionBox>& pred, const std::vector<BoxI>& gt,
                             double iou_threshold);

struct EvalReport {
    double precision = 0, recall = 0, f1 = 0;
};

// Harmonic mean with the 0/0 -> 0 convention.
double f1_score(double precision, double recall);

EvalReport score(long tp, long fp, long fn);
inline EvalReport score(const MatchResult& agg) { return score(agg.tp, agg.fp, agg.fn); }

// Per-tile inputs for threshold selection: precomputed maps plus truth boxes.
struct TileEval {
    MapF sm;
    MapF am;  // image scale
    std::vector<BoxI> gt;
};

struct SweepOptions {
    double iou_threshold = 0.3;
    int min_area = 4;
    Connectivity connectivity = Connectivity::eight;
};

struct SweepResult {
    float lambda_sm = 0, lambda_am = 0;
    EvalReport report;
    long tp = 0, fp = 0, fn = 0;
};

// Exhaustive grid evaluation maximizing F1; ties prefer higher precision,
// then lower lambda_sm, then lower lambda_am.
SweepResult sweep_over_maps(const std::vector<TileEval>& tiles,
                            const std::vector<float>& grid_sm,
                            const std::vector<float>& grid_am, const SweepOptions& opt = {});

}  // namespace vqad
