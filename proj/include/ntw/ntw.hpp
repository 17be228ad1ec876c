#pragma once

#include "ntw/annotate.hpp"
#include "ntw/dom.hpp"
#include "ntw/enumerate.hpp"
#include "ntw/errors.hpp"
#include "ntw/experiment.hpp"
#include "ntw/features.hpp"
#include "ntw/inductors.hpp"
#include "ntw/io.hpp"
#include "ntw/labels.hpp"
#include "ntw/metrics.hpp"
#include "ntw/multitype.hpp"
#include "ntw/ranking.hpp"
#include "ntw/synth.hpp"
