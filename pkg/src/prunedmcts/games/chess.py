"""Standard chess: mailbox move generation, FEN, UCI/SAN move text, draw rules.

Squares are 0..63 with a1 = 0 and h8 = 63.  Pieces are FEN letters
(upper case white, lower case black) and "." for an empty square.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from ..core import Game, GameError, GameOutcome, GameState

STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"
FILES = "abcdefgh"
EMPTY = "."


class ParseError(GameError, ValueError):
    def __init__(self, text: str, offset: int, reason: str):
        super().__init__(f"FEN error at offset {offset}: {reason} ({text!r})")
        self.offset = offset
        self.reason = reason


def square_name(sq: int) -> str:
    return FILES[sq & 7] + str((sq >> 3) + 1)


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILES or name[1] not in "12345678":
        raise ValueError(f"bad square {name!r}")
    return FILES.index(name[0]) + 8 * (int(name[1]) - 1)


def _build_tables():
    knight, king = [], []
    rays = {d: [] for d in ("n", "s", "e", "w", "ne", "nw", "se", "sw")}
    steps = {"n": (0, 1), "s": (0, -1), "e": (1, 0), "w": (-1, 0),
             "ne": (1, 1), "nw": (-1, 1), "se": (1, -1), "sw": (-1, -1)}
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        knight.append(tuple((r + dr) * 8 + f + df for df, dr in
                            ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
                            if 0 <= f + df < 8 and 0 <= r + dr < 8))
        king.append(tuple((r + dr) * 8 + f + df for df in (-1, 0, 1) for dr in (-1, 0, 1)
                          if (df or dr) and 0 <= f + df < 8 and 0 <= r + dr < 8))
        for d, (df, dr) in steps.items():
            ray, ff, rr = [], f + df, r + dr
            while 0 <= ff < 8 and 0 <= rr < 8:
                ray.append(rr * 8 + ff)
                ff += df
                rr += dr
            rays[d].append(tuple(ray))
    return tuple(knight), tuple(king), {d: tuple(v) for d, v in rays.items()}


KNIGHT, KING, RAYS = _build_tables()
ORTHO = (RAYS["n"], RAYS["s"], RAYS["e"], RAYS["w"])
DIAG = (RAYS["ne"], RAYS["nw"], RAYS["se"], RAYS["sw"])
# squares from which a pawn of the given colour attacks sq
PAWN_ATTACKERS = {
    True: tuple(tuple(s for s, ok in ((sq - 9, sq & 7 > 0), (sq - 7, sq & 7 < 7)) if ok and s >= 0) for sq in range(64)),
    False: tuple(tuple(s for s, ok in ((sq + 7, sq & 7 > 0), (sq + 9, sq & 7 < 7)) if ok and s < 64) for sq in range(64)),
}
CASTLE_ROOK_SQUARES = {0: "Q", 7: "K", 56: "q", 63: "k"}


def attacked(board, sq: int, by_white: bool) -> bool:
    if by_white:
        pawn, knight, king, rook, bishop, queen = "PNKRBQ"
    else:
        pawn, knight, king, rook, bishop, queen = "pnkrbq"
    for s in PAWN_ATTACKERS[by_white][sq]:
        if board[s] == pawn:
            return True
    for s in KNIGHT[sq]:
        if board[s] == knight:
            return True
    for s in KING[sq]:
        if board[s] == king:
            return True
    for rays in ORTHO:
        for s in rays[sq]:
            p = board[s]
            if p != EMPTY:
                if p == rook or p == queen:
                    return True
                break
    for rays in DIAG:
        for s in rays[sq]:
            p = board[s]
            if p != EMPTY:
                if p == bishop or p == queen:
                    return True
                break
    return False


class Move(NamedTuple):
    src: int
    dst: int
    promo: str = ""   # lower-case piece letter
    kind: str = ""    # "", "ep", "castle", "double"

    @property
    def uci(self) -> str:
        return square_name(self.src) + square_name(self.dst) + self.promo


class Position:
    """Immutable chess position.  Legal moves and keys are cached lazily."""

    __slots__ = ("board", "white", "castling", "ep", "halfmove", "fullmove",
                 "repetitions", "_legal", "_key")

    def __init__(self, board, white, castling, ep, halfmove, fullmove, repetitions=None):
        self.board = board
        self.white = white
        self.castling = castling
        self.ep = ep            # target square or -1
        self.halfmove = halfmove
        self.fullmove = fullmove
        self._legal = None
        self._key = None
        # keys of positions since the last irreversible move, this one included
        self.repetitions = (repetitions or ()) + (self.key(),)

    # -- identity --------------------------------------------------------
    def key(self):
        if self._key is None:
            self._key = (self.board, self.white, self.castling, self.ep if self._ep_capturable() else -1)
        return self._key

    def _ep_capturable(self) -> bool:
        if self.ep < 0:
            return False
        pawn = "P" if self.white else "p"
        for s in PAWN_ATTACKERS[self.white][self.ep]:
            if self.board[s] == pawn and self._is_legal(Move(s, self.ep, "", "ep")):
                return True
        return False

    # -- move generation -------------------------------------------------
    def king_square(self, white: bool) -> int:
        return self.board.index("K" if white else "k")

    def in_check(self) -> bool:
        return attacked(self.board, self.king_square(self.white), not self.white)

    def _pseudo(self):
        b, white = self.board, self.white
        own = str.isupper if white else str.islower
        moves = []
        fwd = 8 if white else -8
        start_rank, promo_rank = (1, 7) if white else (6, 0)
        for sq in range(64):
            p = b[sq]
            if p == EMPTY or not own(p):
                continue
            t = p.upper()
            if t == "P":
                one = sq + fwd
                if 0 <= one < 64 and b[one] == EMPTY:
                    if one >> 3 == promo_rank:
                        moves.extend(Move(sq, one, pr) for pr in "qrbn")
                    else:
                        moves.append(Move(sq, one))
                        two = one + fwd
                        if sq >> 3 == start_rank and b[two] == EMPTY:
                            moves.append(Move(sq, two, "", "double"))
                f = sq & 7
                for df, dst in ((-1, one - 1), (1, one + 1)):
                    if not (0 <= f + df < 8) or not (0 <= dst < 64):
                        continue
                    q = b[dst]
                    if q != EMPTY and not own(q):
                        if dst >> 3 == promo_rank:
                            moves.extend(Move(sq, dst, pr) for pr in "qrbn")
                        else:
                            moves.append(Move(sq, dst))
                    elif dst == self.ep:
                        moves.append(Move(sq, dst, "", "ep"))
            elif t == "N" or t == "K":
                for dst in (KNIGHT if t == "N" else KING)[sq]:
                    q = b[dst]
                    if q == EMPTY or not own(q):
                        moves.append(Move(sq, dst))
            else:
                dirs = ORTHO if t == "R" else DIAG if t == "B" else ORTHO + DIAG
                for rays in dirs:
                    for dst in rays[sq]:
                        q = b[dst]
                        if q == EMPTY:
                            moves.append(Move(sq, dst))
                        else:
                            if not own(q):
                                moves.append(Move(sq, dst))
                            break
        moves.extend(self._castles())
        return moves

    def _castles(self):
        b, out = self.board, []
        if self.white:
            k, rights, rook, home, enemy = "K", "KQ", "R", 4, False
        else:
            k, rights, rook, home, enemy = "k", "kq", "r", 60, True
        if b[home] != k or not any(c in self.castling for c in rights):
            return out
        if attacked(b, home, enemy):
            return out
        if rights[0] in self.castling and b[home + 3] == rook and b[home + 1] == EMPTY == b[home + 2]:
            if not attacked(b, home + 1, enemy) and not attacked(b, home + 2, enemy):
                out.append(Move(home, home + 2, "", "castle"))
        if rights[1] in self.castling and b[home - 4] == rook and b[home - 1] == EMPTY == b[home - 2] == b[home - 3]:
            if not attacked(b, home - 1, enemy) and not attacked(b, home - 2, enemy):
                out.append(Move(home, home - 2, "", "castle"))
        return out

    def _placement_after(self, m: Move):
        b = list(self.board)
        piece = b[m.src]
        b[m.src] = EMPTY
        if m.promo:
            piece = m.promo.upper() if self.white else m.promo
        b[m.dst] = piece
        if m.kind == "ep":
            b[m.dst - 8 if self.white else m.dst + 8] = EMPTY
        elif m.kind == "castle":
            if m.dst > m.src:
                b[m.src + 1], b[m.src + 3] = b[m.src + 3], EMPTY
            else:
                b[m.src - 1], b[m.src - 4] = b[m.src - 4], EMPTY
        return b

    def _is_legal(self, m: Move) -> bool:
        b = self._placement_after(m)
        ksq = m.dst if self.board[m.src] in "Kk" else self.king_square(self.white)
        return not attacked(b, ksq, not self.white)

    def legal_moves(self) -> dict[str, Move]:
        if self._legal is None:
            self._legal = {m.uci: m for m in self._pseudo() if m.kind == "castle" or self._is_legal(m)}
        return self._legal

    def push(self, m: Move) -> "Position":
        b = self._placement_after(m)
        piece = self.board[m.src]
        capture = self.board[m.dst] != EMPTY or m.kind == "ep"
        castling = self.castling
        if castling:
            if piece == "K":
                castling = castling.replace("K", "").replace("Q", "")
            elif piece == "k":
                castling = castling.replace("k", "").replace("q", "")
            for sq in (m.src, m.dst):
                if sq in CASTLE_ROOK_SQUARES:
                    castling = castling.replace(CASTLE_ROOK_SQUARES[sq], "")
        ep = (m.src + m.dst) // 2 if m.kind == "double" else -1
        irreversible = piece in "Pp" or capture
        halfmove = 0 if irreversible else self.halfmove + 1
        fullmove = self.fullmove + (0 if self.white else 1)
        reps = None if irreversible or castling != self.castling else self.repetitions
        return Position(tuple(b), not self.white, castling, ep, halfmove, fullmove, reps)

    # -- status ----------------------------------------------------------
    def is_checkmate(self) -> bool:
        return not self.legal_moves() and self.in_check()

    def is_stalemate(self) -> bool:
        return not self.legal_moves() and not self.in_check()

    def is_insufficient_material(self) -> bool:
        pieces = [(p, sq) for sq, p in enumerate(self.board) if p != EMPTY and p not in "Kk"]
        if not pieces:
            return True
        if any(p in "PpRrQq" for p, _ in pieces):
            return False
        if len(pieces) == 1:
            return True
        # only bishops, all on one square colour
        if all(p in "Bb" for p, _ in pieces):
            colours = {((sq & 7) + (sq >> 3)) % 2 for _, sq in pieces}
            return len(colours) == 1
        return False

    def is_threefold(self) -> bool:
        return self.repetitions.count(self.key()) >= 3

    def outcome(self) -> tuple[str, str]:
        """(result, reason) with result in {"white", "black", "draw", "*"}."""
        if not self.legal_moves():
            if self.in_check():
                return ("black" if self.white else "white"), "checkmate"
            return "draw", "stalemate"
        if self.is_insufficient_material():
            return "draw", "insufficient material"
        if self.halfmove >= 100:
            return "draw", "fifty-move rule"
        if self.is_threefold():
            return "draw", "threefold repetition"
        return "*", ""

    # -- text ------------------------------------------------------------
    def fen(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            row, run = "", 0
            for f in range(8):
                p = self.board[r * 8 + f]
                if p == EMPTY:
                    run += 1
                else:
                    if run:
                        row += str(run)
                        run = 0
                    row += p
            rows.append(row + (str(run) if run else ""))
        ep = square_name(self.ep) if self._ep_capturable() else "-"
        return "{} {} {} {} {} {}".format("/".join(rows), "w" if self.white else "b",
                                          self.castling or "-", ep, self.halfmove, self.fullmove)

    def __repr__(self):
        return f"Position({self.fen()!r})"

    def material(self, white: bool) -> int:
        own = str.isupper if white else str.islower
        return sum(PIECE_VALUES.get(p.upper(), 0) for p in self.board if p != EMPTY and own(p))

    def parse_san(self, san: str) -> Move | None:
        return parse_san(self, san)

    def san(self, m: Move) -> str:
        return move_to_san(self, m)


# centipawns; the king carries no material value
PIECE_VALUES = {"P": 100, "N": 325, "B": 325, "R": 500, "Q": 900}


def parse_fen(text: str, strict: bool = True) -> Position:
    """Parse a FEN string.  Raises ParseError with the offset of the bad field."""
    fields = text.split()
    if len(fields) == 4:
        fields += ["0", "1"]
    if len(fields) != 6:
        raise ParseError(text, len(text), f"expected 6 fields, got {len(fields)}")
    offsets, pos = [], 0
    for f in fields:
        pos = text.index(f, pos)
        offsets.append(pos)
        pos += len(f)
    placement, turn, castling, ep, half, full = fields
    ranks = placement.split("/")
    if len(ranks) != 8:
        raise ParseError(text, offsets[0], "placement must have 8 ranks")
    board = [EMPTY] * 64
    off = offsets[0]
    for i, row in enumerate(ranks):
        r, f, start = 7 - i, 0, off
        for ch in row:
            if ch.isdigit():
                f += int(ch)
            elif ch in "PNBRQKpnbrqk":
                if f > 7:
                    raise ParseError(text, off, "rank overflows 8 files")
                board[r * 8 + f] = ch
                f += 1
            else:
                raise ParseError(text, off, f"bad piece character {ch!r}")
            off += 1
        if f != 8:
            raise ParseError(text, start, f"rank {r + 1} has {f} files")
        off += 1
    if turn not in ("w", "b"):
        raise ParseError(text, offsets[1], "side to move must be w or b")
    if castling != "-" and (not castling or any(c not in "KQkq" for c in castling)):
        raise ParseError(text, offsets[2], "bad castling field")
    castling = "".join(c for c in "KQkq" if c in castling) if castling != "-" else ""
    if ep == "-":
        ep_sq = -1
    else:
        try:
            ep_sq = parse_square(ep)
        except ValueError:
            raise ParseError(text, offsets[3], "bad en-passant square") from None
        if ep_sq >> 3 not in (2, 5):
            raise ParseError(text, offsets[3], "en-passant square must be on rank 3 or 6")
    try:
        halfmove, fullmove = int(half), int(full)
    except ValueError:
        raise ParseError(text, offsets[4], "move counters must be integers") from None
    if halfmove < 0 or fullmove < 1:
        raise ParseError(text, offsets[4], "move counters out of range")
    if strict:
        if board.count("K") != 1 or board.count("k") != 1:
            raise ParseError(text, 0, "each side needs exactly one king")
        if any(board[sq] in "Pp" for sq in list(range(8)) + list(range(56, 64))):
            raise ParseError(text, 0, "pawn on the first or last rank")
    # drop castling rights whose king or rook is missing
    for right, king_sq, rook_sq, k, r in (("K", 4, 7, "K", "R"), ("Q", 4, 0, "K", "R"),
                                          ("k", 60, 63, "k", "r"), ("q", 60, 56, "k", "r")):
        if right in castling and (board[king_sq] != k or board[rook_sq] != r):
            castling = castling.replace(right, "")
    position = Position(tuple(board), turn == "w", castling, ep_sq, halfmove, fullmove)
    if strict and attacked(position.board, position.king_square(not position.white), position.white):
        raise ParseError(text, offsets[1], "side not to move is in check")
    return position


def perft(position: Position, depth: int) -> int:
    """Number of leaves of the legal move tree at exactly ``depth`` plies."""
    if depth == 0:
        return 1
    moves = position.legal_moves()
    if depth == 1:
        return len(moves)
    return sum(perft(position.push(m), depth - 1) for m in moves.values())


_SAN_RE = re.compile(r"^([NBRQK])?([a-h])?([1-8])?x?([a-h][1-8])(?:=?([NBRQnbrq]))?$")
_UCI_RE = re.compile(r"^[a-h][1-8][a-h][1-8][qrbn]?$")


def parse_san(position: Position, san: str) -> Move | None:
    """Resolve SAN text against the legal moves; None when it matches none or several."""
    text = san.strip().rstrip("+#!?")
    legal = position.legal_moves().values()
    if text in ("O-O", "0-0", "O-O-O", "0-0-0"):
        long = text.count("-") == 2
        for m in legal:
            if m.kind == "castle" and (m.dst < m.src) == long:
                return m
        return None
    match = _SAN_RE.match(text)
    if not match:
        return None
    piece, from_file, from_rank, dst, promo = match.groups()
    piece = piece or "P"
    dst_sq = parse_square(dst)
    hits = []
    for m in legal:
        if m.dst != dst_sq or m.kind == "castle" or position.board[m.src].upper() != piece:
            continue
        if from_file and FILES[m.src & 7] != from_file:
            continue
        if from_rank and str((m.src >> 3) + 1) != from_rank:
            continue
        if (m.promo or None) != (promo.lower() if promo else None):
            continue
        hits.append(m)
    return hits[0] if len(hits) == 1 else None


def move_to_san(position: Position, m: Move) -> str:
    if m.kind == "castle":
        san = "O-O" if m.dst > m.src else "O-O-O"
    else:
        piece = position.board[m.src].upper()
        capture = position.board[m.dst] != EMPTY or m.kind == "ep"
        if piece == "P":
            san = (FILES[m.src & 7] + "x" if capture else "") + square_name(m.dst)
            if m.promo:
                san += "=" + m.promo.upper()
        else:
            rivals = [o for o in position.legal_moves().values()
                      if o.dst == m.dst and o.src != m.src and position.board[o.src].upper() == piece]
            dis = ""
            if rivals:
                if all((o.src & 7) != (m.src & 7) for o in rivals):
                    dis = FILES[m.src & 7]
                elif all((o.src >> 3) != (m.src >> 3) for o in rivals):
                    dis = str((m.src >> 3) + 1)
                else:
                    dis = square_name(m.src)
            san = piece + dis + ("x" if capture else "") + square_name(m.dst)
    after = position.push(m)
    if after.is_checkmate():
        san += "#"
    elif after.in_check():
        san += "+"
    return san


class Chess(Game):
    """Chess from an arbitrary FEN.  The side to move in that FEN is Max."""

    name = "chess"

    def __init__(self, fen: str = STARTING_FEN):
        self.start = parse_fen(fen)
        self.max_is_white = self.start.white

    def _initial_board(self) -> Position:
        return self.start

    def _legal(self, board: Position, ply: int):
        return board.legal_moves()

    def _play(self, board: Position, action: str, ply: int) -> Position:
        return board.push(board.legal_moves()[action])

    def _outcome(self, board: Position, ply: int) -> GameOutcome:
        result, _ = board.outcome()
        if result == "*":
            return GameOutcome.ONGOING
        if result == "draw":
            return GameOutcome.DRAW
        return GameOutcome.MAX_WINS if (result == "white") == self.max_is_white else GameOutcome.MIN_WINS

    def state_key(self, state: GameState):
        return state.board.key(), state.board.repetitions, state.board.halfmove

    def fen(self, state: GameState) -> str:
        return state.board.fen()

    def board_text(self, state: GameState) -> str:
        return state.board.fen()

    def parse_action(self, state: GameState, text: str) -> str | None:
        token = text.strip().strip(".,;:!?\"'()[]`*")
        if not token:
            return None
        if _UCI_RE.match(token.lower()):
            return token.lower()
        m = parse_san(state.board, token)
        if m is not None:
            return m.uci
        # syntactically SAN but unresolvable: report it as an illegal move
        if _SAN_RE.match(token.rstrip("+#!?")) or token.rstrip("+#") in ("O-O", "O-O-O"):
            return "?" + token
        return None

    def max_material_edge(self, state: GameState) -> int:
        """Max-side material minus Min-side material, in centipawns."""
        b = state.board
        return b.material(self.max_is_white) - b.material(not self.max_is_white)
