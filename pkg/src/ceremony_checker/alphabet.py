"""The closed symbolic alphabet of the ceremony models."""

from .values import sym

HelloClient = sym("HelloClient")
HelloServer = sym("HelloServer")
ClientFinished = sym("ClientFinished")
ServerFinished = sym("ServerFinished")
Data = sym("Data")
Warning = sym("Warning")
Webpage = sym("Webpage")
Continue = sym("Continue")
Abort = sym("Abort")
StoreCertificate = sym("StoreCertificate")
Pk = sym("Pk")
HSTS = sym("HSTS")
No_HSTS = sym("No_HSTS")
S = sym("S")
I = sym("I")
SignCA = sym("SignCA")
SignS = sym("SignS")
SignI = sym("SignI")
expi = sym("expi")
noexpi = sym("noexpi")
revo = sym("revo")
norevo = sym("norevo")

ALL = (HelloClient, HelloServer, ClientFinished, ServerFinished, Data, Warning,
       Webpage, Continue, Abort, StoreCertificate, Pk, HSTS, No_HSTS, S, I,
       SignCA, SignS, SignI, expi, noexpi, revo, norevo)
