class SteerkeyError(Exception):
    pass

class SteerkeyErrorList(SteerkeyError):
    def __init__(self, errors):
        self.errors = errors

    def __str__(self):
        from pprint import pformat
        msg = pformat(self.errors)
        if '\n' in msg:
            msg = '\n' + msg
        return msg

class AssemblyError(SteerkeyError):
    pass

class CertificationError(SteerkeyError):
    pass

class ContractError(SteerkeyError):
    pass

class DimensionMismatch(ContractError):
    pass

class DomainError(SteerkeyError, ValueError):
    pass

class DegenerateRetention(DomainError):
    pass

class ExpectedIssue(SteerkeyError):
    pass

class Infeasible(SteerkeyError):
    def __init__(self, message, node=None, certificate=None):
        super(Infeasible, self).__init__(message)
        self.node = node
        self.certificate = certificate

class InvalidOptions(SteerkeyError):
    pass

class ParseError(SteerkeyError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = 'line %s: %s' % (lineno, message)
        super(ParseError, self).__init__(message)
        self.lineno = lineno

class ValueIssue(SteerkeyErrorList):
    pass
