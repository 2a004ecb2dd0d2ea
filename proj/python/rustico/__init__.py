"""B-COSFIRE / RUSTICO curvilinear-structure delineation.

Thin wrapper over the C++ core: trainable bar-selective COSFIRE filters,
push-pull inhibition, multi-orientation responses and the evaluation metrics
(tolerance-based precision/recall/F, MCC, CAL, Wilcoxon signed-rank).
"""

from ._core import (  # noqa: F401
    CosfireFilter,
    RusticoOperator,
    Tuple4,
    __version__,
    cal,
    centerline_prf,
    configure,
    convolve,
    count_components,
    derive_inhibitor,
    dilate_disk,
    dog_kernel,
    dog_response,
    gaussian_blur,
    gaussian_kernel,
    make_bar_fixture,
    make_bar_plus_texture_fixture,
    make_crossed_bars_fixture,
    make_curve_fixture,
    mcc,
    multi_orientation_cosfire,
    multi_orientation_response,
    orientation_set,
    rectify,
    render_bar_prototype,
    response,
    rustico_response,
    shift,
    skeletonize,
    sweep_thresholds,
    threshold_grid,
    threshold_map,
    wilcoxon_signed_rank,
)
