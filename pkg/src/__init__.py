# weyltrace package
