#pragma once

#include <span>
#include <vector>

#include "multifit/slic.hpp"
#include "multifit/types.hpp"

namespace multifit {

/// Correspondences whose features share a superpixel (or a merged pair of
/// adjacent superpixels) in one view.
struct Group {
    std::vector<int> members;  ///< correspondence indices, ascending
    /// (view, superpixel id) sources; one entry before combination, two after.
    std::vector<std::pair<int, int>> source_superpixels;
    Box region;  ///< union of the source superpixels' bounding boxes
};

struct GroupSet {
    std::vector<Group> groups;
    int view = 1;    ///< which view's segmentation produced the groups
    double S = 0.0;  ///< grid interval of that view's image
    /// Group-index adjacency derived from superpixel boundary contact,
    /// so combine_groups needs no access to the label map.
    std::vector<std::vector<int>> neighbors;
};

/// Buckets correspondences by the superpixel containing their view-k
/// feature (features are snapped to the nearest pixel and clamped into the
/// label map). Produces one group per occupied superpixel, in ascending
/// superpixel id order, with members in ascending correspondence index.
GroupSet partition_groups(std::span<const Correspondence> correspondences, const LabelMap& lm,
                          int view);

/// Combines each group with every boundary neighbor whose union bounding
/// box fits in a 2S x 2S window. Groups that take part in no merge pass
/// through unchanged. Output order: pass-through groups in input order,
/// then merged pairs (i, j), i < j, in lexicographic order.
GroupSet combine_groups(const GroupSet& gs, double s);

/// Ranking of a group's member positions by non-ascending score; equal
/// scores stay in ascending correspondence-index order.
std::vector<int> sort_group(const Group& g, std::span<const Correspondence> correspondences);

}  // namespace multifit
