"""Filesystem-backed annotation sessions.

One directory per session, using the toolkit's own formats, so state is
inspectable and survives restarts:

    <root>/<id>/session.json     predictor spec, dimensions, round count
    <root>/<id>/rgb.png          uploaded image
    <root>/<id>/gt.png           optional GT (enables the oracle predictor)
    <root>/<id>/initial.obfmap   round-0 prediction (NMS-thinned)
    <root>/<id>/prev.obfmap      current previous-output map
    <root>/<id>/rounds/NNNN/     scribbles.json, fn.png, fp.png,
                                 prob.obfmap, ob.png

A round directory is written completely before session.json is swapped
in atomically, so a crash can only lose the round in flight.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ObkitError
from ..raster import read_mask, read_obfmap, write_mask, write_obfmap

__all__ = ["SessionStore", "SessionState"]


@dataclass
class SessionState:
    id: str
    root: Path
    predictor: str
    width: int
    height: int
    rounds: int
    threshold: float
    mode: str

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def round_dir(self, n: int) -> Path:
        return self.root / "rounds" / f"{n:04d}"


class SessionStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, predictor: str, width: int, height: int,
               threshold: float, mode: str) -> SessionState:
        sid = uuid.uuid4().hex[:16]
        sdir = self.root / sid
        (sdir / "rounds").mkdir(parents=True)
        state = SessionState(id=sid, root=sdir, predictor=predictor, width=width,
                             height=height, rounds=0, threshold=threshold, mode=mode)
        self._write_meta(state)
        return state

    def _write_meta(self, state: SessionState) -> None:
        meta = {
            "id": state.id,
            "predictor": state.predictor,
            "width": state.width,
            "height": state.height,
            "rounds": state.rounds,
            "threshold": state.threshold,
            "mode": state.mode,
        }
        tmp = state.root / "session.json.tmp"
        tmp.write_text(json.dumps(meta, indent=1))
        tmp.replace(state.root / "session.json")

    def get(self, session_id: str) -> Optional[SessionState]:
        sdir = self.root / session_id
        meta_path = sdir / "session.json"
        if not meta_path.is_file():
            return None
        try:
            meta = json.loads(meta_path.read_text())
        except json.JSONDecodeError as e:
            raise ObkitError(f"corrupt session metadata for {session_id}: {e}") from e
        return SessionState(id=meta["id"], root=sdir, predictor=meta["predictor"],
                            width=meta["width"], height=meta["height"],
                            rounds=meta["rounds"], threshold=meta["threshold"],
                            mode=meta["mode"])

    def commit_round(self, state: SessionState, scribble_doc: str, fnfp, prob, ob,
                     prev) -> int:
        """Persist one completed round; returns its number (1-based)."""
        n = state.rounds + 1
        rdir = state.round_dir(n)
        rdir.mkdir(parents=True, exist_ok=True)
        (rdir / "scribbles.json").write_text(scribble_doc)
        write_mask(rdir / "fn.png", fnfp.fn)
        write_mask(rdir / "fp.png", fnfp.fp)
        write_obfmap(rdir / "prob.obfmap", prob)
        write_mask(rdir / "ob.png", ob)
        write_obfmap(state.root / "prev.obfmap", prev)
        state.rounds = n
        self._write_meta(state)
        return n

    # raster accessors -------------------------------------------------

    def save_initial(self, state: SessionState, rgb_bytes: bytes, initial_prob,
                     prev, initial_ob) -> None:
        (state.root / "rgb.png").write_bytes(rgb_bytes)
        write_obfmap(state.root / "initial.obfmap", initial_prob)
        write_obfmap(state.root / "prev.obfmap", prev)
        write_mask(state.root / "initial_ob.png", initial_ob)

    def load_rgb(self, state: SessionState) -> np.ndarray:
        from ..raster import load_rgb

        return load_rgb(state.root / "rgb.png")

    def load_gt(self, state: SessionState):
        path = state.root / "gt.png"
        return read_mask(path) if path.is_file() else None

    def load_prev(self, state: SessionState):
        return read_obfmap(state.root / "prev.obfmap")

    def load_initial(self, state: SessionState):
        return read_obfmap(state.root / "initial.obfmap")

    def load_ob(self, state: SessionState, round_n: Optional[int] = None):
        """Latest (or requested) thinned OB mask; round 0 is the initial one."""
        n = state.rounds if round_n is None else round_n
        if n <= 0:
            return read_mask(state.root / "initial_ob.png")
        return read_mask(state.round_dir(n) / "ob.png")
