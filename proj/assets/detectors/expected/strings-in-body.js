// Braces inside strings and comments must not confuse the body scan.
var AB_MSG = "{ blocked }";

function adsAreBlocked() {return false;}

if (adsAreBlocked()) document.title = "[ad blocker]";
