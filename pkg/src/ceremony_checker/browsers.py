"""Per-browser certificate-validation processes.

Each builder returns the body of one browsing session. The session opens with
the per-session revocation/expiry choice and the ui.Webpage reset, runs the
TLS handshake against whichever server answers, applies the browser's decision
logic, and either aborts or completes and hands the page to the user.
"""

from __future__ import annotations

from .alphabet import (Abort, ClientFinished, Data, HSTS, HelloClient,
                       HelloServer, S, I, ServerFinished, SignCA, StoreCertificate,
                       Warning, Webpage, expi, noexpi, norevo, revo)
from .syntax import (EAnd, EArr, EConst, EEq, EIn, ENot, EOr, EVar, PCall,
                     PChoice, PCond, PEvent, PIn, PIndexed, POut, PSeq, SKIP,
                     SAdd, SAssign, SIf, PatBind, PatConst, TAU)

# macro bodies (PAT #defines are textual, so guards inline them)
CERT_VALID = EAnd(EAnd(EEq(EArr("cert", EConst(0)), EVar("typed_url")),
                       EEq(EArr("cert", EConst(2)), EConst(SignCA))),
                  EEq(EArr("extendedcert", EConst(4)), EConst(noexpi)))
CERT_VALID_NR = EAnd(CERT_VALID, EEq(EArr("extendedcert", EConst(5)), EConst(norevo)))
URL_HAS_HSTS = EOr(EIn("dynamicHSTSList", EVar("typed_url")),
                   EIn("preloadedHSTSList", EVar("typed_url")))
CERT_STORED = EIn("ServerCert", EVar("extendedcert"))
USER_WANT_S = EEq(EVar("typed_url"), EConst(S))
AUTH_FAIL = EAnd(EVar("intruder_server"), USER_WANT_S)

_RESET = (SAssign("finishTLS", None, EConst(False)),
          SAssign("intruder_server", None, EConst(False)),
          SAssign("user_warned", None, EConst(False)))


def _flag(value: bool) -> PEvent:
    # anonymous statement block: {finishTLS=...} -> Skip
    return PEvent(TAU, (SAssign("finishTLS", None, EConst(value)),), SKIP)


def _warn_block(can_store: bool) -> PEvent:
    set_finish = [SAssign("finishTLS", None, EConst(True))]
    if can_store:
        set_finish.append(SIf(EEq(EVar("userchoice"), EConst(StoreCertificate)),
                              (SAdd("ServerCert", EVar("extendedcert")),)))
    decide = SIf(EEq(EVar("userchoice"), EConst(Abort)),
                 (SAssign("finishTLS", None, EConst(False)),),
                 tuple(set_finish))
    return PEvent("DisplayWarning", (),
                  POut("ui", (EConst(Warning),), (SAssign("user_warned", None, EConst(True)),),
                       PIn("ui", (PatBind("userchoice"),), (),
                           PEvent(TAU, (decide,), SKIP))))


def _store_hsts(validity) -> PCond:
    # Check_Header guard; no else branch, falls through to the next session
    return PCond(EAnd(EEq(EVar("header"), EConst(HSTS)), validity),
                 PEvent("StoreHSTSpolicy", (),
                        PEvent(TAU, (SAdd("dynamicHSTSList", EArr("cert", EConst(0))),), SKIP)),
                 None, atomic=True)


def _completion(header_check=None):
    tail = SKIP if header_check is None else PEvent("Check_Header", (), header_check)
    return PEvent("Finish_TLS", (),
                  POut("network", (EConst(ClientFinished),), (),
                       PEvent("Process_DATA", (),
                              PIn("network",
                                  (PatConst(ServerFinished), PatBind("header"), PatConst(Data)), (),
                                  PEvent("Display_Webpage", (),
                                         POut("ui", (EConst(Data),), (), tail))))))


def _session(recv_stmts, decision, completion, tail, assume_no_expiry: bool):
    exp_domain = (noexpi,) if assume_no_expiry else (expi, noexpi)
    finish = PSeq(decision,
                  PSeq(PCond(ENot(EVar("finishTLS")),
                             POut("network", (EConst(Abort),), (), SKIP),
                             completion, atomic=True),
                       tail))
    return PIndexed("rev", (revo, norevo),
                    PIndexed("exp", exp_domain,
                             PEvent("Display_Webpage", (),
                                    POut("ui", (EConst(Webpage),), _RESET,
                                         PIn("ui", (PatBind("url"),), (),
                                             PEvent("Resolve_URL", (),
                                                    PEvent("Init_TLS", (),
                                                           POut("network", (EVar("url"), EConst(HelloClient)), (),
                                                                PIn("network",
                                                                    (PatConst(HelloServer), PatBind("id"),
                                                                     PatBind("pk"), PatBind("sk")),
                                                                    recv_stmts,
                                                                    PEvent("Check_Certificate", (), finish))))))))))


def _cell(arr, i, value):
    return SAssign(arr, EConst(i), value)


# certificate receipt: short browsers track cert[] only, the expiry choice is
# still bound into extendedcert[4] so the shared validity macro is meaningful
_RECV_SHORT = (_cell("cert", 0, EVar("id")), _cell("cert", 1, EVar("pk")),
               _cell("cert", 2, EVar("sk")), _cell("extendedcert", 4, EVar("exp")))

_RECV_EXTENDED = (_cell("extendedcert", 0, EVar("id")), _cell("cert", 0, EVar("id")),
                  _cell("extendedcert", 1, EVar("pk")), _cell("cert", 1, EVar("pk")),
                  _cell("extendedcert", 2, EVar("sk")), _cell("cert", 2, EVar("sk")),
                  _cell("extendedcert", 3, EVar("url")),
                  _cell("extendedcert", 4, EVar("exp")))

_RECV_SAFARI = _RECV_EXTENDED + (_cell("extendedcert", 5, EVar("rev")),)

_REV_REVO = EEq(EVar("rev"), EConst(revo))
_HSTS_OR_REVOKED = EOr(URL_HAS_HSTS, _REV_REVO)


def seb_session(tail, assume_no_expiry=False):
    decision = PCond(_REV_REVO, _flag(False),
                     PCond(CERT_VALID, _flag(True), _flag(False)))
    return _session(_RECV_SHORT, decision, _completion(), tail, assume_no_expiry)


def firefox_classic_session(tail, assume_no_expiry=False):
    decision = PCond(CERT_VALID, _flag(True),
                     PCond(_HSTS_OR_REVOKED, _flag(False),
                           PCond(CERT_STORED, _flag(True), _warn_block(can_store=True),
                                 atomic=True),
                           atomic=True),
                     atomic=True)
    return _session(_RECV_EXTENDED, decision, _completion(_store_hsts(CERT_VALID)),
                    tail, assume_no_expiry)


def firefox_private_session(tail, assume_no_expiry=False):
    decision = PCond(CERT_VALID, _flag(True),
                     PCond(_HSTS_OR_REVOKED, _flag(False),
                           PCond(CERT_STORED, _flag(True), _warn_block(can_store=False))))
    return _session(_RECV_EXTENDED, decision, _completion(), tail, assume_no_expiry)


def chrome_classic_session(tail, assume_no_expiry=False):
    decision = PCond(CERT_VALID, _flag(True),
                     PCond(_HSTS_OR_REVOKED, _flag(False), _warn_block(can_store=False)))
    return _session(_RECV_SHORT, decision, _completion(_store_hsts(CERT_VALID)),
                    tail, assume_no_expiry)


def chrome_private_session(tail, assume_no_expiry=False):
    decision = PCond(CERT_VALID, _flag(True),
                     PCond(_HSTS_OR_REVOKED, _flag(False), _warn_block(can_store=False)))
    return _session(_RECV_SHORT, decision, _completion(), tail, assume_no_expiry)


def safari_classic_session(tail, assume_no_expiry=False):
    decision = PCond(EOr(CERT_VALID_NR, CERT_STORED), _flag(True),
                     PCond(_HSTS_OR_REVOKED, _flag(False), _warn_block(can_store=True)))
    return _session(_RECV_SAFARI, decision, _completion(_store_hsts(CERT_VALID_NR)),
                    tail, assume_no_expiry)


def safari_private_session(tail, assume_no_expiry=False):
    decision = PCond(EOr(CERT_VALID_NR, CERT_STORED), _flag(True),
                     _warn_block(can_store=True))
    return _session(_RECV_SAFARI, decision, _completion(), tail, assume_no_expiry)


def ie_session(tail, assume_no_expiry=False):
    decision = PCond(_REV_REVO, _flag(False),
                     PCond(CERT_VALID, _flag(True), _warn_block(can_store=False)))
    return _session(_RECV_SHORT, decision, _completion(), tail, assume_no_expiry)


def opera_mini_session(tail, assume_no_expiry=False):
    decision = PCond(_REV_REVO, _flag(False), _flag(True))
    return _session(_RECV_SHORT, decision, _completion(), tail, assume_no_expiry)


SESSION_BUILDERS = {
    "seb": {"classic": seb_session, "private": seb_session},
    "firefox": {"classic": firefox_classic_session, "private": firefox_private_session},
    "chrome": {"classic": chrome_classic_session, "private": chrome_private_session},
    "safari": {"classic": safari_classic_session, "private": safari_private_session},
    "ie": {"classic": ie_session, "private": ie_session},
    "opera_mini": {"classic": opera_mini_session, "private": opera_mini_session},
}


def browser_defs(browser: str, mode: str, assume_no_expiry: bool) -> dict:
    """Process definitions for the Browser component of one scenario."""
    builders = SESSION_BUILDERS[browser]
    if mode == "interleaved":
        classic = builders["classic"](SKIP, assume_no_expiry)
        private = builders["private"](SKIP, assume_no_expiry)
        return {
            "BrowserClassicSession": ((), classic),
            "BrowserPrivateSession": ((), private),
            "Browser": ((), PChoice(PSeq(PCall("BrowserClassicSession"), PCall("Browser")),
                                    PSeq(PCall("BrowserPrivateSession"), PCall("Browser")))),
        }
    body = builders[mode](PCall("Browser"), assume_no_expiry)
    return {"Browser": ((), body)}
