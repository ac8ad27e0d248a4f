"""The three log-management strategies behind one event interface.

lazy         log fragments stay at the BS where they were written; each
             handoff stores a pointer in the new BS, recovery chases the
             pointer chain.
pessimistic  the entire log plus checkpoint follows the host to the new BS
             on every handoff, so recovery is local.
proposed     write events buffer in the host cache and flush to the region's
             BSC (on cache exhaustion and on handoff); inter-BSC handoffs
             re-register the host and migrate the consolidated log.

Cost accounting conventions, applied uniformly:

* Data items (log entries, checkpoints) pay ``alpha * unit`` on the wireless
  hop and ``rho * unit * hops`` on the wired path.
* Control messages pay a flat ``c_m`` each, booked as wired cost, except the
  recovery request which the model prices at ``alpha * c_m`` (wireless).
* ``elapsed_transfer_time`` counts 1 per item crossing the wireless link and
  ``r`` per item per wired hop; control messages take no time.
* Handoff channel signalling common to every strategy is not priced; only
  strategy-differential costs appear in a CostDelta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import Checkpoint, CostParams, LogEntry, SimParams
from .topology import (
    BscId,
    CellId,
    MoveKind,
    NetworkTree,
    Site,
    bs_site,
    bsc_of,
    bsc_site,
    classify_move,
    hop_distance,
    mh_site,
)


class StrategyKind(Enum):
    LAZY = "lazy"
    PESSIMISTIC = "pessimistic"
    PROPOSED = "proposed"


@dataclass
class CostDelta:
    """Cost of one strategy action, split by link type."""

    wireless_cost: float = 0.0  # alpha-weighted
    wired_cost: float = 0.0  # rho-weighted data plus flat control messages
    control_msgs: int = 0
    data_items_moved: int = 0
    elapsed_transfer_time: float = 0.0

    @property
    def total(self) -> float:
        return self.wireless_cost + self.wired_cost

    def add(self, other: "CostDelta") -> "CostDelta":
        self.wireless_cost += other.wireless_cost
        self.wired_cost += other.wired_cost
        self.control_msgs += other.control_msgs
        self.data_items_moved += other.data_items_moved
        self.elapsed_transfer_time += other.elapsed_transfer_time
        return self


@dataclass
class RecoveryOutcome:
    """Result of one recovery attempt."""

    success: bool
    retrieval_time: float
    cost: CostDelta
    fragments_fetched: int  # non-empty log fragments plus the checkpoint
    recovered_in_home_region: bool
    lost_entries: int = 0  # cached-but-unflushed writes lost with the host


@dataclass
class Fragment:
    """A contiguous run of log entries held at one site."""

    site: Site
    entries: list[LogEntry] = field(default_factory=list)


@dataclass
class HostState:
    """Mutable per-run state of the mobile host."""

    host_id: int
    current_cell: CellId
    current_bsc: BscId
    home_bsc: BscId  # BSC holding the consolidated log (proposed only)
    cache: list[LogEntry] = field(default_factory=list)
    last_checkpoint: Checkpoint = field(default_factory=lambda: Checkpoint(0, 0, 0.0))
    next_seq: int = 1
    writes_since_ckpt: int = 0


@dataclass
class StrategyStore:
    """Durable placement of the checkpoint and log fragments."""

    checkpoint_site: Site | None
    fragments: list[Fragment] = field(default_factory=list)
    pointer_chain_length: int = 0  # lazy only


class LogStrategy:
    """Shared machinery; subclasses fill in the placement policy."""

    kind: StrategyKind

    def __init__(self, tree: NetworkTree, sp: SimParams, cp: CostParams):
        self.tree = tree
        self.sp = sp
        self.cp = cp

    # -- setup ---------------------------------------------------------

    def initial_host(self, cell: CellId = 0, host_id: int = 0) -> HostState:
        bsc = bsc_of(self.tree, cell)
        return HostState(host_id=host_id, current_cell=cell, current_bsc=bsc, home_bsc=bsc)

    def initial_store(self, host: HostState) -> StrategyStore:
        """Seed checkpoint 0 at the host's birth site at zero cost: the
        initial application state is registered where the transaction
        starts, so recovery always has a durable baseline."""
        store = StrategyStore(checkpoint_site=self._checkpoint_site(host))
        self._reset_fragments(host, store)
        return store

    # -- events --------------------------------------------------------

    def on_write(self, host: HostState, store: StrategyStore, t: float) -> CostDelta:
        entry = LogEntry(host.next_seq, host.last_checkpoint.ckpt_seq, t)
        host.next_seq += 1
        host.writes_since_ckpt += 1
        return self._log_entry(host, store, entry)

    def on_checkpoint(self, host: HostState, store: StrategyStore, t: float) -> CostDelta:
        """Ship a fresh checkpoint to its durable site and purge the log.

        The checkpoint originates at the host: one wireless hop, then the
        wired path to the durable site. Every strategy purges fragments
        older than the new checkpoint, and lazy's pointer chain resets with
        them since the pointers only locate purged fragments.
        """
        host.last_checkpoint = Checkpoint(
            ckpt_seq=host.last_checkpoint.ckpt_seq + 1,
            covered_writes=host.writes_since_ckpt,
            timestamp=t,
        )
        host.writes_since_ckpt = 0
        site = self._checkpoint_site(host)
        hops = hop_distance(self.tree, bs_site(host.current_cell), site)
        delta = CostDelta(
            wireless_cost=self.cp.alpha * self.cp.c_c,
            wired_cost=self.cp.rho * self.cp.c_c * hops,
            data_items_moved=1,
            elapsed_transfer_time=1.0 + self.cp.r * hops,
        )
        store.checkpoint_site = site
        host.cache.clear()
        store.pointer_chain_length = 0
        self._reset_fragments(host, store)
        return delta

    def on_handoff(
        self,
        host: HostState,
        store: StrategyStore,
        from_cell: CellId,
        to_cell: CellId,
        t: float,
    ) -> CostDelta:
        move = classify_move(self.tree, from_cell, to_cell)
        host.current_cell = to_cell
        host.current_bsc = bsc_of(self.tree, to_cell)
        return self._handoff(host, store, from_cell, to_cell, move)

    def recover(
        self, host: HostState, store: StrategyStore, recovery_cell: CellId, t: float
    ) -> RecoveryOutcome:
        """Retrieve the checkpoint and every durable fragment at the cell
        where the host restarts, replay, and re-home the fetched copies.

        Retrieval time is load time plus transfer time; transfer costs are
        priced per item over the wired path and the final wireless hop. The
        fetched copies physically arrive at the recovery site, so placement
        strategies that keep the log near the host adopt them as the new
        durable copy at no extra transfer cost.
        """
        cp = self.cp
        failure_bsc = host.current_bsc
        recovery_bsc = bsc_of(self.tree, recovery_cell)
        in_home_region = recovery_bsc == failure_bsc

        delta = CostDelta(wireless_cost=cp.alpha * cp.c_m, control_msgs=1)
        delta.add(self._locate_log(host, store, recovery_bsc))

        rec_site = bs_site(recovery_cell)
        fragments_fetched = 0
        for frag in store.fragments:
            n = len(frag.entries)
            if n == 0:
                continue
            hops = hop_distance(self.tree, frag.site, rec_site)
            delta.wired_cost += cp.rho * n * cp.c_1 * hops
            delta.wireless_cost += cp.alpha * n * cp.c_1
            delta.data_items_moved += n
            delta.elapsed_transfer_time += n * (1.0 + cp.r * hops)
            fragments_fetched += 1

        if store.checkpoint_site is not None:
            hops = hop_distance(self.tree, store.checkpoint_site, rec_site)
            delta.wired_cost += cp.rho * cp.c_c * hops
            delta.wireless_cost += cp.alpha * cp.c_c
            delta.data_items_moved += 1
            delta.elapsed_transfer_time += 1.0 + cp.r * hops
            fragments_fetched += 1
            retrieval_time = cp.t_load_ckpt
        else:
            retrieval_time = 0.0
        retrieval_time += cp.t_load_log * fragments_fetched + delta.elapsed_transfer_time

        # Unflushed cache entries die with the host; only durable state
        # replays. The surviving write count shrinks accordingly.
        lost = len(host.cache)
        host.cache.clear()
        host.writes_since_ckpt -= lost

        host.current_cell = recovery_cell
        host.current_bsc = recovery_bsc
        self._after_recovery(host, store, recovery_cell)

        return RecoveryOutcome(
            success=retrieval_time <= self.sp.recovery_deadline,
            retrieval_time=retrieval_time,
            cost=delta,
            fragments_fetched=fragments_fetched,
            recovered_in_home_region=in_home_region,
            lost_entries=lost,
        )

    def log_locations(self, host: HostState, store: StrategyStore) -> list[tuple[Site, int]]:
        """Current fragment placement snapshot, in replay order."""
        out = [(f.site, len(f.entries)) for f in store.fragments]
        if host.cache:
            out.append((mh_site(host.host_id), len(host.cache)))
        return out

    def replay_sequence(self, host: HostState, store: StrategyStore) -> list[int]:
        """Entry seqs recoverable in order: durable fragments then cache."""
        seqs = [e.seq for f in store.fragments for e in f.entries]
        seqs.extend(e.seq for e in host.cache)
        return seqs

    # -- policy hooks ---------------------------------------------------

    def _checkpoint_site(self, host: HostState) -> Site:
        return bs_site(host.current_cell)

    def _reset_fragments(self, host: HostState, store: StrategyStore) -> None:
        store.fragments.clear()

    def _log_entry(self, host: HostState, store: StrategyStore, entry: LogEntry) -> CostDelta:
        raise NotImplementedError

    def _handoff(
        self,
        host: HostState,
        store: StrategyStore,
        from_cell: CellId,
        to_cell: CellId,
        move: MoveKind,
    ) -> CostDelta:
        raise NotImplementedError

    def _locate_log(self, host: HostState, store: StrategyStore, recovery_bsc: BscId) -> CostDelta:
        return CostDelta()

    def _after_recovery(self, host: HostState, store: StrategyStore, recovery_cell: CellId) -> None:
        pass

    # -- shared pieces ---------------------------------------------------

    def _bs_write_delta(self) -> CostDelta:
        # One wireless data item plus the BSC's acknowledgement message.
        return CostDelta(
            wireless_cost=self.cp.alpha * self.cp.c_1,
            wired_cost=self.cp.c_m,
            control_msgs=1,
            data_items_moved=1,
            elapsed_transfer_time=1.0,
        )


class LazyStrategy(LogStrategy):
    """Fragments accumulate where written; handoffs only store pointers."""

    kind = StrategyKind.LAZY

    def _log_entry(self, host: HostState, store: StrategyStore, entry: LogEntry) -> CostDelta:
        site = bs_site(host.current_cell)
        if store.fragments and store.fragments[-1].site == site:
            store.fragments[-1].entries.append(entry)
        else:
            store.fragments.append(Fragment(site, [entry]))
        return self._bs_write_delta()

    def _handoff(self, host, store, from_cell, to_cell, move) -> CostDelta:
        # The new BS stores a pointer to the old one; no log data moves.
        store.pointer_chain_length += 1
        return CostDelta(wired_cost=self.cp.c_m, control_msgs=1)

    def _locate_log(self, host, store, recovery_bsc) -> CostDelta:
        # Chase the pointer chain back to the fragments, one message a link.
        chain = store.pointer_chain_length
        return CostDelta(wired_cost=chain * self.cp.c_m, control_msgs=chain)

    def _after_recovery(self, host, store, recovery_cell) -> None:
        # Fragments stay put; the restart BS links into the existing chain
        # so the next recovery can still find them. Registration signalling
        # is common to all strategies and not priced.
        if store.fragments and store.fragments[-1].site != bs_site(recovery_cell):
            store.pointer_chain_length += 1


class PessimisticStrategy(LogStrategy):
    """One fragment, co-located with the host's BS at all times."""

    kind = StrategyKind.PESSIMISTIC

    def _reset_fragments(self, host: HostState, store: StrategyStore) -> None:
        store.fragments[:] = [Fragment(bs_site(host.current_cell))]

    def _log_entry(self, host, store, entry) -> CostDelta:
        store.fragments[0].entries.append(entry)
        return self._bs_write_delta()

    def _handoff(self, host, store, from_cell, to_cell, move) -> CostDelta:
        frag = store.fragments[0]
        n = len(frag.entries)
        hops = hop_distance(self.tree, bs_site(from_cell), bs_site(to_cell))
        cp = self.cp
        frag.site = bs_site(to_cell)
        store.checkpoint_site = bs_site(to_cell)
        return CostDelta(
            wired_cost=(n * cp.c_1 + cp.c_c) * cp.rho * hops + cp.c_m,
            control_msgs=1,
            data_items_moved=n + 1,
            elapsed_transfer_time=(n + 1) * cp.r * hops,
        )

    def _after_recovery(self, host, store, recovery_cell) -> None:
        # The retrieval already delivered log and checkpoint to the restart
        # BS; they become the durable copy there.
        if store.fragments:
            store.fragments[0].site = bs_site(recovery_cell)
        if store.checkpoint_site is not None:
            store.checkpoint_site = bs_site(recovery_cell)


class ProposedStrategy(LogStrategy):
    """Cache on the host, consolidate at the region's BSC."""

    kind = StrategyKind.PROPOSED

    def _checkpoint_site(self, host: HostState) -> Site:
        return bsc_site(host.home_bsc)

    def _log_entry(self, host, store, entry) -> CostDelta:
        host.cache.append(entry)
        if len(host.cache) >= self.sp.cache_capacity:
            return self._flush_cache(host, store)
        return CostDelta()

    def _flush_cache(self, host: HostState, store: StrategyStore) -> CostDelta:
        """Copy the entire cache to the home BSC and append it there."""
        n = len(host.cache)
        if n == 0:
            return CostDelta()
        cp = self.cp
        target = bsc_site(host.home_bsc)
        hops = hop_distance(self.tree, bs_site(host.current_cell), target)
        delta = CostDelta(
            wireless_cost=n * cp.alpha * cp.c_1,
            wired_cost=n * cp.rho * cp.c_1 * hops + cp.c_m,
            control_msgs=1,
            data_items_moved=n,
            elapsed_transfer_time=n * (1.0 + cp.r * hops),
        )
        if store.fragments and store.fragments[-1].site == target:
            store.fragments[-1].entries.extend(host.cache)
        else:
            store.fragments.append(Fragment(target, list(host.cache)))
        host.cache.clear()
        return delta

    def _handoff(self, host, store, from_cell, to_cell, move) -> CostDelta:
        if move is MoveKind.INTRA_BSC:
            # The durable log is already at this region's BSC; only the
            # cache moves.
            return self._flush_cache(host, store)

        cp = self.cp
        old_home = host.home_bsc
        new_bsc = host.current_bsc
        # Registration: Connect(MHid, PBSCid) to the new BSC, which then
        # notifies the old home BSC of the host's reachability.
        delta = CostDelta(wired_cost=2 * cp.c_m, control_msgs=2)

        # The old home BSC transfers its whole fragment plus the checkpoint
        # to the new BSC, which becomes the home.
        n_home = sum(len(f.entries) for f in store.fragments)
        hops = hop_distance(self.tree, bsc_site(old_home), bsc_site(new_bsc))
        delta.wired_cost += (n_home * cp.c_1 + cp.c_c) * cp.rho * hops
        delta.data_items_moved += n_home + 1
        delta.elapsed_transfer_time += (n_home + 1) * cp.r * hops

        merged = [e for f in store.fragments for e in f.entries]
        store.fragments[:] = [Fragment(bsc_site(new_bsc), merged)] if merged else []
        store.checkpoint_site = bsc_site(new_bsc)
        host.home_bsc = new_bsc

        delta.add(self._flush_cache(host, store))
        return delta

    def _locate_log(self, host, store, recovery_bsc) -> CostDelta:
        # Tracking agent asks the HLR/VLR where the log lives when the host
        # restarts outside the home region.
        if recovery_bsc != host.home_bsc:
            return CostDelta(wired_cost=self.cp.c_m, control_msgs=1)
        return CostDelta()

    def _after_recovery(self, host, store, recovery_cell) -> None:
        # Retrieval delivered the full log and checkpoint to the recovery
        # region; its BSC adopts them and becomes the home BSC, restoring
        # the consolidation invariant.
        new_home = bsc_of(self.tree, recovery_cell)
        merged = [e for f in store.fragments for e in f.entries]
        store.fragments[:] = [Fragment(bsc_site(new_home), merged)] if merged else []
        store.checkpoint_site = bsc_site(new_home)
        host.home_bsc = new_home


_STRATEGIES = {
    StrategyKind.LAZY: LazyStrategy,
    StrategyKind.PESSIMISTIC: PessimisticStrategy,
    StrategyKind.PROPOSED: ProposedStrategy,
}


def make_strategy(
    kind: StrategyKind | str, tree: NetworkTree, sp: SimParams, cp: CostParams
) -> LogStrategy:
    if isinstance(kind, str):
        kind = StrategyKind(kind)
    return _STRATEGIES[kind](tree, sp, cp)
