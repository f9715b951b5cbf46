#pragma once

#include "arc_topology.hpp"
#include "cone.hpp"
#include "csv.hpp"
#include "dimension.hpp"
#include "errors.hpp"
#include "gallery.hpp"
#include "hutchinson.hpp"
#include "ifs_path.hpp"
#include "io.hpp"
#include "level_curve.hpp"
#include "non_arc.hpp"
#include "orthogonal.hpp"
#include "pipeline.hpp"
#include "polyline.hpp"
#include "quasiarc.hpp"
#include "report.hpp"
#include "scalar.hpp"
#include "segments.hpp"
#include "similarity.hpp"
#include "successive.hpp"
#include "svg.hpp"
#include "systems.hpp"
#include "theorem14.hpp"
