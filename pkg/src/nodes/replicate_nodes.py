"""
LangGraph Nodes for the Replicate Pipeline

Implements one replicate of an experiment:
PREPARE → FIT → KERNEL → ALIGN → LANDMARK → EVALUATE
"""

import logging
from typing import Dict, List, Optional

import numpy as np

from ..config import ENSEMBLE_MODELS, KERNEL_MODELS, ExperimentConfig
from ..data.dataio import subsample
from ..data.simgen import generate, split_train_test
from ..ensembles import fit_gbt, fit_rf, predict_ensemble
from ..kernels import (
    AlignmentSpectrum,
    alignment_spectrum,
    cross_kernel,
    fit_krr,
    kernel_matrix,
    landmark_alignment,
    landmark_cross_design,
    landmark_design,
    landmark_fit,
    landmark_predict,
    predict_krr,
    select_landmarks,
    summarize_alignment,
    sym_eig,
)
from ..state import FULL_KERNEL, PhaseMessage, ReplicateRecord, ReplicateState, SpectrumRow
from ..utils import derive_seed, make_rng, mean_squared_error, pearson

logger = logging.getLogger(__name__)

# Order fixes the stream index handed to derive_seed.
SEED_STREAMS = ("data", "split", "rf", "gbt", "landmark")

# Summaries use the leading 10 components.
_SUMMARY_COMPONENTS = 10


def _banner(state: ReplicateState, phase: str) -> None:
    logger.debug(f"[replicate {state['replicate_index']}] PHASE: {phase}")


def _record(
    replicate: int,
    model: str,
    n_landmarks: int,
    y_test: np.ndarray,
    predictions: np.ndarray,
    spectrum: Optional[AlignmentSpectrum] = None,
    ridge: Optional[float] = None,
) -> ReplicateRecord:
    summary = None
    if spectrum is not None and len(spectrum) >= _SUMMARY_COMPONENTS:
        summary = summarize_alignment(spectrum)
    return ReplicateRecord(
        replicate=replicate,
        model=model,
        n_landmarks=n_landmarks,
        test_cc=pearson(predictions, y_test),
        test_mse=mean_squared_error(y_test, predictions),
        align_first=summary.first if summary else None,
        align_best=summary.best if summary else None,
        align_top5=summary.top5_of_10 if summary else None,
        best_index=summary.best_index if summary else None,
        ridge=ridge,
    )


def _spectrum_rows(
    replicate: int, model: str, n_landmarks: int, spectrum: AlignmentSpectrum
) -> List[SpectrumRow]:
    return [
        SpectrumRow(
            replicate=replicate,
            model=model,
            n_landmarks=n_landmarks,
            component=int(c),
            value=float(v),
            alignment=float(a),
        )
        for c, v, a in zip(spectrum.component_index, spectrum.values, spectrum.alignment)
    ]


def _message(phase: str, message: str) -> PhaseMessage:
    return PhaseMessage(phase=phase, message=message)


def prepare_node(state: ReplicateState) -> Dict:
    """
    PREPARE Node - Draw or subsample the data and split it

    Every random stream of the replicate gets its own seed derived from
    (master_seed, replicate_index).
    """
    _banner(state, "PREPARE")
    config: ExperimentConfig = state["config"]
    index = state["replicate_index"]

    replicate_seed = derive_seed(config.master_seed, index)
    seeds = {stream: derive_seed(replicate_seed, i) for i, stream in enumerate(SEED_STREAMS)}

    if config.scenario is not None:
        data = generate(config.scenario.model_copy(update={"seed": seeds["data"]}))
    else:
        data = state["source"]
        threshold = config.csv.subsample_threshold
        if data.n > threshold:
            data = subsample(data, threshold, make_rng(seeds["data"]))

    train, test = split_train_test(data, config.train_fraction, make_rng(seeds["split"]))

    return {
        "status": "fitting",
        "seeds": seeds,
        "train": train,
        "test": test,
        "messages": state["messages"]
        + [_message("prepare", f"{train.n} train / {test.n} test rows, p={train.p}")],
    }


def fit_node(state: ReplicateState) -> Dict:
    """
    FIT Node - Grow the ensembles the requested models need
    """
    _banner(state, "FIT")
    config: ExperimentConfig = state["config"]
    train = state["train"]
    seeds = state["seeds"]

    ensembles = {}
    if config.needs_ensemble("rf"):
        ensembles["rf"] = fit_rf(
            train,
            m_trees=config.rf.m_trees,
            config=config.rf.tree,
            master_seed=seeds["rf"],
            workers=config.tree_workers,
        )
    if config.needs_ensemble("gbt"):
        ensembles["gbt"] = fit_gbt(train, params=config.gbt, master_seed=seeds["gbt"])

    return {
        "status": "kernel",
        "ensembles": ensembles,
        "messages": state["messages"] + [_message("fit", f"fitted {sorted(ensembles)}")],
    }


def kernel_node(state: ReplicateState) -> Dict:
    """
    KERNEL Node - Train and test-vs-train co-occurrence kernels
    """
    _banner(state, "KERNEL")
    config: ExperimentConfig = state["config"]
    train, test = state["train"], state["test"]

    kernels = {}
    for model in config.kernel_models():
        ensemble = state["ensembles"][KERNEL_MODELS[model]]
        kernels[model] = (
            kernel_matrix(ensemble, train, workers=config.tree_workers),
            cross_kernel(ensemble, test, train, workers=config.tree_workers),
        )

    return {"status": "aligning", "kernels": kernels}


def align_node(state: ReplicateState) -> Dict:
    """
    ALIGN Node - Eigendecompose each train kernel and score its spectrum
    """
    _banner(state, "ALIGN")
    config: ExperimentConfig = state["config"]
    train = state["train"]
    index = state["replicate_index"]
    n_components = min(config.n_components, train.n)

    spectra = {}
    rows = list(state["spectrum_rows"])
    for model, (K, _) in state["kernels"].items():
        eig = sym_eig(K.values)
        spectrum = alignment_spectrum(eig.eigenvectors, eig.eigenvalues, train.y, n_components)
        spectra[model] = spectrum
        rows.extend(_spectrum_rows(index, model, FULL_KERNEL, spectrum))

    return {"status": "landmarks", "spectra": spectra, "spectrum_rows": rows}


def landmark_node(state: ReplicateState) -> Dict:
    """
    LANDMARK Node - Landmark spectra and predictors for every n_L

    Both kernel models share the landmark rows chosen for a given n_L.
    Counts above the training size are skipped with a warning.
    """
    _banner(state, "LANDMARK")
    config: ExperimentConfig = state["config"]
    train, test = state["train"], state["test"]
    index = state["replicate_index"]

    records = list(state["records"])
    rows = list(state["spectrum_rows"])
    messages = list(state["messages"])
    for n_landmarks in config.landmark_counts:
        if n_landmarks > train.n:
            logger.warning(
                f"⚠️  replicate {index}: skipping n_L={n_landmarks} (only {train.n} training rows)"
            )
            messages.append(_message("landmark", f"skipped n_L={n_landmarks}"))
            continue

        rng = make_rng(derive_seed(state["seeds"]["landmark"], n_landmarks))
        indices = select_landmarks(train.n, n_landmarks, rng)
        for model, (K, Kx) in state["kernels"].items():
            design = landmark_design(K, indices)
            spectrum = landmark_alignment(
                design, train.y, min(config.n_components, n_landmarks)
            )
            coefficients = landmark_fit(design, train.y)
            predictions = landmark_predict(coefficients, landmark_cross_design(Kx, indices))

            rows.extend(_spectrum_rows(index, model, n_landmarks, spectrum))
            records.append(_record(index, model, n_landmarks, test.y, predictions, spectrum))

    return {
        "status": "evaluating",
        "records": records,
        "spectrum_rows": rows,
        "messages": messages,
    }


def evaluate_node(state: ReplicateState) -> Dict:
    """
    EVALUATE Node - Kernel ridge regression and raw ensemble test metrics
    """
    _banner(state, "EVALUATE")
    config: ExperimentConfig = state["config"]
    train, test = state["train"], state["test"]
    index = state["replicate_index"]

    records = list(state["records"])
    for model in config.models:
        if model in KERNEL_MODELS:
            K, Kx = state["kernels"][model]
            krr = fit_krr(K, train.y, center=config.center_targets)
            predictions = predict_krr(krr, Kx)
            records.append(
                _record(
                    index,
                    model,
                    FULL_KERNEL,
                    test.y,
                    predictions,
                    state["spectra"][model],
                    ridge=krr.ridge,
                )
            )
        else:
            ensemble = state["ensembles"][ENSEMBLE_MODELS[model]]
            records.append(
                _record(index, model, FULL_KERNEL, test.y, predict_ensemble(ensemble, test.X))
            )

    return {
        "status": "completed",
        "records": records,
        "messages": state["messages"]
        + [_message("evaluate", f"{len(records)} records")],
    }
