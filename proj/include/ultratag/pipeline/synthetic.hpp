#pragma once

#include "ultratag/core/graph.hpp"
#include "ultratag/pipeline/config.hpp"

namespace ultratag::pipeline {

/// Planted-partition text-attributed graph. Node i has label i mod classes.
/// Texts mix Zipf-weighted class words ("c<class>w<j>") with uniform noise
/// words ("n<j>"); class names are the three most frequent class words.
/// Throws ConfigError when p_inter >= p_intra or a field is out of range.
TextAttributedGraph gen_synthetic(const SyntheticSpec& spec);

}  // namespace ultratag::pipeline
