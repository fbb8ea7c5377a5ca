#pragma once

#include "patchprior/denoise.hpp"
#include "patchprior/em_adapt.hpp"
#include "patchprior/em_train.hpp"
#include "patchprior/errors.hpp"
#include "patchprior/gmm.hpp"
#include "patchprior/image.hpp"
#include "patchprior/manifest.hpp"
#include "patchprior/model_io.hpp"
#include "patchprior/parallel.hpp"
#include "patchprior/patches.hpp"
#include "patchprior/pgm.hpp"
#include "patchprior/sure.hpp"
#include "patchprior/synthetic.hpp"
