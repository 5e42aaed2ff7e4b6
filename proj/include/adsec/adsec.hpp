#pragma once

// Umbrella header for the full pipeline: knowledge-base-driven attack-defense
// tree generation, ADTerm scenario extraction, GWT test stub generation with
// verdict aggregation, and LTL-based security pattern verification on traces.

#include "adsec/adterm.hpp"
#include "adsec/adtree.hpp"
#include "adsec/csv.hpp"
#include "adsec/diagram.hpp"
#include "adsec/errors.hpp"
#include "adsec/gherkin.hpp"
#include "adsec/kb.hpp"
#include "adsec/ltl.hpp"
#include "adsec/report.hpp"
#include "adsec/testgen.hpp"
#include "adsec/treegen.hpp"
#include "adsec/verify.hpp"
#include "adsec/xml.hpp"
